#pragma once

// Kernels for the generalized symmetric tridiagonal pencil (K, M) with K
// given by its diagonal and first off-diagonal and M diagonal positive.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace morselab::tridiag {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Number of generalized eigenvalues strictly below sigma, by Sylvester's law
/// of inertia applied to the LDL^T pivots of K - sigma M. Returns nullopt
/// when a pivot vanishes exactly.
template <typename Scalar>
std::optional<Eigen::Index> count_below(const Vec<Scalar>& diag, const Vec<Scalar>& off,
                                        const Vec<Scalar>& mass, Scalar sigma) {
    const Eigen::Index n = diag.size();
    Eigen::Index negatives = 0;
    Scalar d = 1;
    for (Eigen::Index k = 0; k < n; ++k) {
        Scalar a = diag(k) - sigma * mass(k);
        if (k > 0) a -= off(k - 1) * off(k - 1) / d;
        if (a == Scalar(0)) return std::nullopt;
        negatives += (a < 0);
        d = a;
    }
    return negatives;
}

/// Solves (K - sigma M) x = rhs by the Thomas algorithm (no pivoting; sigma
/// must not coincide with an eigenvalue to working precision). `work` is
/// scratch space resized as needed; x may alias rhs.
template <typename Scalar>
void solve_shifted_into(const Vec<Scalar>& diag, const Vec<Scalar>& off, const Vec<Scalar>& mass, Scalar sigma,
                        const Vec<Scalar>& rhs, Vec<Scalar>& x, Vec<Scalar>& work) {
    const Eigen::Index n = diag.size();
    work.resize(n);
    x.resize(n);
    const Scalar tiny = std::numeric_limits<Scalar>::min();
    Scalar piv = diag(0) - sigma * mass(0);
    if (piv == Scalar(0)) piv = tiny;
    Scalar inv = 1 / piv;
    x(0) = rhs(0) * inv;
    for (Eigen::Index k = 1; k < n; ++k) {
        const Scalar c = off(k - 1) * inv;
        work(k - 1) = c;
        piv = diag(k) - sigma * mass(k) - off(k - 1) * c;
        if (piv == Scalar(0)) piv = tiny;
        inv = 1 / piv;
        x(k) = (rhs(k) - off(k - 1) * x(k - 1)) * inv;
    }
    for (Eigen::Index k = n - 2; k >= 0; --k) x(k) -= work(k) * x(k + 1);
}

template <typename Scalar>
Vec<Scalar> solve_shifted(const Vec<Scalar>& diag, const Vec<Scalar>& off, const Vec<Scalar>& mass,
                          Scalar sigma, const Vec<Scalar>& rhs) {
    Vec<Scalar> x, work;
    solve_shifted_into(diag, off, mass, sigma, rhs, x, work);
    return x;
}

/// y = K x for the tridiagonal K.
template <typename Scalar>
Vec<Scalar> apply(const Vec<Scalar>& diag, const Vec<Scalar>& off, const Vec<Scalar>& x) {
    const Eigen::Index n = diag.size();
    Vec<Scalar> y = diag.cwiseProduct(x);
    if (n > 1) {
        y.head(n - 1) += off.cwiseProduct(x.tail(n - 1));
        y.tail(n - 1) += off.cwiseProduct(x.head(n - 1));
    }
    return y;
}

/// Gershgorin interval for the spectrum of M^{-1/2} K M^{-1/2}.
template <typename Scalar>
std::pair<Scalar, Scalar> gershgorin(const Vec<Scalar>& diag, const Vec<Scalar>& off,
                                     const Vec<Scalar>& mass) {
    const Eigen::Index n = diag.size();
    Scalar lo = std::numeric_limits<Scalar>::max();
    Scalar hi = std::numeric_limits<Scalar>::lowest();
    for (Eigen::Index k = 0; k < n; ++k) {
        Scalar radius = 0;
        if (k > 0) radius += std::abs(off(k - 1)) / std::sqrt(mass(k) * mass(k - 1));
        if (k + 1 < n) radius += std::abs(off(k)) / std::sqrt(mass(k) * mass(k + 1));
        const Scalar c = diag(k) / mass(k);
        lo = std::min(lo, c - radius);
        hi = std::max(hi, c + radius);
    }
    return {lo, hi};
}

}  // namespace morselab::tridiag
