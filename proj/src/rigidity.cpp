#include "morselab/rigidity.hpp"

#include "morselab/errors.hpp"
#include "morselab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace morselab {

std::string to_string(CurvatureTag tag) {
    switch (tag) {
        case CurvatureTag::all_distinct: return "all-distinct";
        case CurvatureTag::multiplicity_n2: return "multiplicity-(n-2)";
        case CurvatureTag::umbilic_zero: return "umbilic-zero";
        case CurvatureTag::other: return "other";
    }
    return "other";
}

std::string to_string(RigidityBranch branch) {
    switch (branch) {
        case RigidityBranch::hyperplane: return "hyperplane";
        case RigidityBranch::catenoid: return "catenoid";
        case RigidityBranch::distinct_point: return "distinct-point";
        case RigidityBranch::unclassified: return "unclassified";
    }
    return "unclassified";
}

namespace {

double max_abs(const Eigen::VectorXd& k) { return k.size() ? k.cwiseAbs().maxCoeff() : 0.0; }

// Equality classes of the tuple under the relative tolerance (transitive closure).
std::vector<int> equality_classes(const Eigen::VectorXd& k, double tol) {
    const Eigen::Index m = k.size();
    const double eps = tol * max_abs(k);
    std::vector<int> cls(m);
    for (Eigen::Index i = 0; i < m; ++i) cls[i] = static_cast<int>(i);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j)
            if (std::abs(k(i) - k(j)) <= eps) {
                const int from = cls[j], to = cls[i];
                for (auto& c : cls)
                    if (c == from) c = to;
            }
    return cls;
}

bool same(const Eigen::VectorXd& k, double tol, Eigen::Index i, Eigen::Index j) {
    return std::abs(k(i) - k(j)) <= tol * max_abs(k);
}

}  // namespace

CurvatureTag classify(const Eigen::VectorXd& kappas, double tol) {
    if (kappas.size() < 2) throw InputError("a curvature tuple needs at least two entries");
    const double scale = max_abs(kappas);
    if (std::abs(kappas.sum()) > tol * std::max(scale, 1.0))
        throw InputError("curvature tuple is not minimal: sum = " + std::to_string(kappas.sum()));
    if (scale <= 1e-12) return CurvatureTag::umbilic_zero;

    const int n = static_cast<int>(kappas.size()) + 1;
    const auto cls = equality_classes(kappas, tol);
    std::vector<int> sizes(cls.size(), 0);
    for (int c : cls) ++sizes[c];
    const int largest = *std::max_element(sizes.begin(), sizes.end());
    if (n >= 4 && largest == n - 2) return CurvatureTag::multiplicity_n2;
    if (largest == 1) return CurvatureTag::all_distinct;
    return CurvatureTag::other;
}

MultiplicityScan multiplicity_scan(const std::vector<Eigen::VectorXd>& samples, double tol) {
    MultiplicityScan scan;
    scan.tags.reserve(samples.size());
    for (const auto& k : samples) {
        const CurvatureTag tag = classify(k, tol);
        scan.tags.push_back(tag);
        switch (tag) {
            case CurvatureTag::all_distinct: ++scan.all_distinct; break;
            case CurvatureTag::multiplicity_n2: ++scan.multiplicity_n2; break;
            case CurvatureTag::umbilic_zero: ++scan.umbilic_zero; break;
            case CurvatureTag::other: ++scan.other; break;
        }
    }
    const long total = static_cast<long>(samples.size());
    scan.has_distinct_point = scan.all_distinct > 0;
    scan.multiplicity_everywhere = total > 0 && scan.multiplicity_n2 + scan.umbilic_zero == total;
    if (total == 0)
        scan.branch = RigidityBranch::unclassified;
    else if (scan.umbilic_zero == total)
        scan.branch = RigidityBranch::hyperplane;
    else if (scan.has_distinct_point)
        scan.branch = RigidityBranch::distinct_point;
    else if (scan.multiplicity_everywhere)
        scan.branch = RigidityBranch::catenoid;
    return scan;
}

std::vector<Eigen::VectorXd> curvature_samples(const ProfileGrid& grid) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(grid.size()));
    for (Eigen::Index k = 0; k < grid.size(); ++k) out.push_back(principal_curvatures(grid, k));
    return out;
}

namespace {

int rational_rank(std::vector<std::vector<Rational>> rows, std::size_t cols) {
    int rank = 0;
    for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && rows[pivot][c].is_zero()) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == static_cast<std::size_t>(rank) || rows[r][c].is_zero()) continue;
            const Rational f = rows[r][c] / rows[rank][c];
            for (std::size_t j = c; j < cols; ++j) rows[r][j] = rows[r][j] - f * rows[rank][j];
        }
        ++rank;
    }
    return rank;
}

}  // namespace

ConstraintCount constraint_count(const Eigen::VectorXd& kappas, double tol) {
    const Eigen::Index d = kappas.size();
    ConstraintCount out;
    out.unknowns = static_cast<int>(1 + d + d * (d + 1) / 2);

    // Hessian entry (i, j), i <= j, stored after value and gradient.
    std::vector<std::vector<Eigen::Index>> slot(d, std::vector<Eigen::Index>(d));
    Eigen::Index next = 1 + d;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i; j < d; ++j) slot[i][j] = slot[j][i] = next++;

    const auto cols = static_cast<std::size_t>(out.unknowns);
    std::vector<std::vector<Rational>> rows;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j)
            if (!same(kappas, tol, i, j)) {
                std::vector<Rational> row(cols);
                row[slot[i][j]] = 1;
                rows.push_back(std::move(row));
            }
    std::vector<Rational> trace(cols);
    for (Eigen::Index i = 0; i < d; ++i) trace[slot[i][i]] = 1;
    rows.push_back(std::move(trace));

    out.constraints = rational_rank(std::move(rows), cols);
    out.dimension = out.unknowns - out.constraints;
    out.form_dimension = out.dimension - 1;
    return out;
}

int constraint_rank(const Eigen::VectorXd& kappas, double tol) { return constraint_count(kappas, tol).dimension; }

FrameResiduals frame_equation_check(const ProfileGrid& grid) {
    FrameResiduals out;
    if (grid.is_plane()) {
        out.skipped = true;
        return out;
    }
    const Eigen::Index N = grid.size();
    if (N < 5) throw DomainError("frame check needs at least five samples");
    Eigen::VectorXd lambda(N);
    for (Eigen::Index k = 0; k < N; ++k) lambda(k) = frame_at(grid, k).kappa_m;
    if ((lambda.array() == 0.0).any()) {
        out.skipped = true;
        return out;
    }
    // e_3(λ)/λ as the derivative of log|λ|, which is far smoother than λ near the neck.
    const Eigen::VectorXd log_lambda = lambda.array().abs().log();
    const double n1 = grid.n - 1;
    for (Eigen::Index k = 2; k + 2 < N; ++k) {
        const double dl = (log_lambda(k - 2) - 8 * log_lambda(k - 1) + 8 * log_lambda(k + 1) - log_lambda(k + 2)) /
                          (12 * grid.h);
        const double a = -dl / n1;
        out.connection_residual = std::max(out.connection_residual, std::abs(grid.rp(k) / grid.r(k) - a));
        ++out.samples;
    }
    return out;
}

BoundReport bound_report(int n, int ends, int b1, long index, long nullity_lb, RigidityBranch branch) {
    if (n < 3) throw DomainError("n must be at least 3");
    if (ends < 1) throw DomainError("a complete hypersurface has at least one end");
    if (b1 < 0) throw DomainError("b1 must be nonnegative");
    if (index < 0 || nullity_lb < 0) throw DomainError("index and nullity must be nonnegative");

    BoundReport r;
    r.n = n;
    r.ends = ends;
    r.b1 = b1;
    r.index = index;
    r.nullity_lb = nullity_lb;
    r.branch = branch;
    const Rational c(2, static_cast<std::int64_t>(n) * (n - 1));
    r.rhs_thm11 = c * Rational(ends + b1 - 1);
    r.rhs_thm13 = c * Rational(ends + b1) - Rational(4, n);
    r.thm11_ok = Rational(index + nullity_lb) >= r.rhs_thm11;
    r.thm13_ok = Rational(index) >= r.rhs_thm13;

    r.l = ends + b1 - 1;
    r.form_bound = 2 * n - 3;
    r.branch_lhs = Rational(r.l) - Rational(static_cast<std::int64_t>(n) * (n - 1) / 2) * Rational(index);
    switch (branch) {
        case RigidityBranch::hyperplane: r.branch_ok = r.l == 0 && index == 0; break;
        case RigidityBranch::catenoid: r.branch_ok = r.l == 1 && index == 1; break;
        case RigidityBranch::distinct_point: r.branch_ok = !(Rational(r.form_bound) < r.branch_lhs); break;
        case RigidityBranch::unclassified: r.branch_ok = false; break;
    }
    return r;
}

BoundReport bound_report(int n, int ends, int b1, const SpectralReport& spectral, RigidityBranch branch) {
    return bound_report(n, ends, b1, spectral.morse_index, spectral.nullity_lower_bound, branch);
}

}  // namespace morselab
