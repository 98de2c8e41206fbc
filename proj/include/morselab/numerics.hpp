#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace morselab {

/// Surface area of the unit sphere S^m embedded in R^{m+1}.
inline double sphere_volume(int m) {
    const double k = 0.5 * (m + 1);
    return 2.0 * std::pow(std::numbers::pi, k) / std::tgamma(k);
}

/// Volume of the unit ball in R^d.
inline double ball_volume(int d) {
    const double k = 0.5 * d;
    return std::pow(std::numbers::pi, k) / std::tgamma(k + 1.0);
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>
gauss_legendre(int npts) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Vec x(npts), w(npts);
    const Scalar pi = std::numbers::pi_v<Scalar>;
    for (int i = 0; i < (npts + 1) / 2; ++i) {
        Scalar z = std::cos(pi * (i + Scalar(0.75)) / (npts + Scalar(0.5)));
        Scalar dp = 0;
        for (int it = 0; it < 100; ++it) {
            Scalar p0 = 1, p1 = 0;
            for (int j = 1; j <= npts; ++j) {
                const Scalar p2 = p1;
                p1 = p0;
                p0 = ((2 * j - 1) * z * p1 - (j - 1) * p2) / j;
            }
            dp = npts * (z * p0 - p1) / (z * z - 1);
            const Scalar dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 4 * std::numeric_limits<Scalar>::epsilon()) break;
        }
        x(i) = -z;
        x(npts - 1 - i) = z;
        w(i) = w(npts - 1 - i) = 2 / ((1 - z * z) * dp * dp);
    }
    return {x, w};
}

/// Composite Simpson rule for equally spaced samples; an odd interval count
/// closes with the 3/8 rule on the last three intervals.
template <typename Derived>
typename Derived::Scalar simpson(const Eigen::MatrixBase<Derived>& f, typename Derived::Scalar h) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index intervals = f.size() - 1;
    if (intervals <= 0) return Scalar(0);
    if (intervals == 1) return h * (f(0) + f(1)) / 2;
    Eigen::Index even_end = (intervals % 2 == 0) ? intervals : intervals - 3;
    Scalar acc = 0;
    for (Eigen::Index k = 0; k + 2 <= even_end; k += 2) acc += f(k) + 4 * f(k + 1) + f(k + 2);
    acc *= h / 3;
    if (even_end != intervals) {
        const Eigen::Index k = even_end;
        acc += 3 * h / 8 * (f(k) + 3 * f(k + 1) + 3 * f(k + 2) + f(k + 3));
    }
    return acc;
}

/// Observed convergence order from errors at spacings h and h/2.
inline double observed_order(double err_coarse, double err_fine) {
    return std::log2(std::abs(err_coarse) / std::abs(err_fine));
}

inline double int_pow(double x, int k) {
    double acc = 1.0;
    for (int i = 0; i < k; ++i) acc *= x;
    return acc;
}

inline double binomial(int top, int bottom) {
    if (bottom < 0 || top < 0 || bottom > top) return 0.0;
    double acc = 1.0;
    for (int i = 1; i <= bottom; ++i) acc = acc * (top - bottom + i) / i;
    return acc;
}

}  // namespace morselab
