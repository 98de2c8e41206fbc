#include "morselab/spectral.hpp"

#include "morselab/numerics.hpp"
#include "morselab/tridiagonal.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace morselab {

namespace {

constexpr Eigen::Index kDirectLimit = 4000;  // unknowns solved by bisection directly
constexpr Eigen::Index kCoarseCells = 2000;  // per side, for the coarse estimate

// Absolute resolution of an inertia count: roundoff in the pivots is relative
// to the largest entry of M^{-1} K.
double count_resolution(const ModeOperator& op) {
    return 16 * std::numeric_limits<double>::epsilon() * op.diag.cwiseQuotient(op.mass).cwiseAbs().maxCoeff();
}

double bisect_eigenvalue(const ModeOperator& op, Eigen::Index j, double lo, double hi) {
    // Invariant: count_below(lo) <= j < count_below(hi).
    const double floor = 0.0625 * count_resolution(op);
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= std::max(4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)),
                                floor))
            break;
        (count_below(op, mid) > j ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

// Smallest sigma (found by doubling from a lower bound) with more than j
// eigenvalues below it.
double upper_bracket(const ModeOperator& op, Eigen::Index j, double lo) {
    double step = 1e-3;
    double hi = lo + step;
    while (count_below(op, hi) <= j) {
        step *= 2;
        hi = lo + step;
        if (!std::isfinite(hi)) throw FactorizationError("could not bracket eigenvalue");
    }
    return hi;
}

void m_orthonormalize(Eigen::VectorXd& v, const Eigen::MatrixXd& previous, Eigen::Index used,
                      const Eigen::VectorXd& mass) {
    for (Eigen::Index c = 0; c < used; ++c) {
        const auto u = previous.col(c);
        v -= (u.array() * mass.array() * v.array()).sum() * u;
    }
    v /= std::sqrt((v.array().square() * mass.array()).sum());
}

Eigen::VectorXd inverse_iteration(const ModeOperator& op, double sigma, Eigen::VectorXd v,
                                  const Eigen::MatrixXd& previous, Eigen::Index used, int steps) {
    m_orthonormalize(v, previous, used, op.mass);
    Eigen::VectorXd rhs, work;
    for (int it = 0; it < steps; ++it) {
        rhs = op.mass.cwiseProduct(v);
        tridiag::solve_shifted_into<double>(op.diag, op.off, op.mass, sigma, rhs, v, work);
        m_orthonormalize(v, previous, used, op.mass);
    }
    return v;
}

EigenPairs bisection_pairs(const ModeOperator& op, int count) {
    EigenPairs out;
    out.values.resize(count);
    out.vectors.resize(op.size(), count);
    const double lo0 = tridiag::gershgorin<double>(op.diag, op.off, op.mass).first - 1.0;
    double lo = lo0;
    for (Eigen::Index j = 0; j < count; ++j) {
        const double hi = upper_bracket(op, j, lo);
        const double lam = bisect_eigenvalue(op, j, lo, hi);
        out.values(j) = lam;
        lo = lam - 1e-12 * std::max(1.0, std::abs(lam));
        if (count_below(op, lo) > j) lo = lo0;
    }
    for (Eigen::Index j = 0; j < count; ++j) {
        const double lam = out.values(j);
        const double shift = lam - 1e-13 * std::max(1.0, std::abs(lam));
        out.vectors.col(j) =
            inverse_iteration(op, shift, Eigen::VectorXd::Ones(op.size()), out.vectors, j, 3);
    }
    return out;
}

ProfileGrid coarse_copy(const ProfileGrid& grid, double S) {
    if (grid.is_plane()) return make_plane(grid.n, S, 2 * kCoarseCells);
    return solve_profile(grid.n, grid.r0, S, kCoarseCells);
}

// Linear interpolation of a coarse vector (on coarse unknowns) at fine unknowns.
Eigen::VectorXd prolong(const ProfileGrid& coarse, const ModeOperator& cop, const Eigen::VectorXd& cv,
                        const ProfileGrid& fine, const ModeOperator& fop) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(coarse.size());
    full.segment(cop.first, cop.size()) = cv;
    Eigen::VectorXd out(fop.size());
    const double s0 = coarse.s(0);
    for (Eigen::Index i = 0; i < fop.size(); ++i) {
        const double s = fine.s(fop.first + i);
        const double x = (s - s0) / coarse.h;
        auto k = static_cast<Eigen::Index>(std::floor(x));
        k = std::clamp<Eigen::Index>(k, 0, coarse.size() - 2);
        const double t = x - static_cast<double>(k);
        out(i) = (1 - t) * full(k) + t * full(k + 1);
    }
    return out;
}

bool has_index(const ModeOperator& op, Eigen::Index j, double lam) {
    const double delta = std::max(1e-6 * std::abs(lam), count_resolution(op));
    return count_below(op, lam - delta) <= j && count_below(op, lam + delta) > j;
}

Eigen::VectorXd mode_residual(const ProfileGrid& grid, const RadialMetric& metric, int l,
                              const Eigen::VectorXd& F) {
    const int m = grid.sphere_dim();
    const double mu = l * (l + m - 1.0);
    const double h2 = grid.h * grid.h;
    Eigen::VectorXd R = Eigen::VectorXd::Zero(grid.size());
    for (Eigen::Index k = 1; k + 1 < grid.size(); ++k) {
        if (metric.weight(k) == 0.0) continue;
        const double div =
            (metric.flux(k) * (F(k + 1) - F(k)) - metric.flux(k - 1) * (F(k) - F(k - 1))) / (h2 * metric.weight(k));
        R(k) = div + (metric.normsqA(k) - mu * metric.inv_r2(k)) * F(k);
    }
    return R;
}

double relative_residual(const ProfileGrid& grid, int l, const Eigen::VectorXd& F) {
    const RadialMetric metric = radial_metric(grid);
    const Eigen::VectorXd R = mode_residual(grid, metric, l, F);
    double den = 0.0;
    for (Eigen::Index k = 1; k + 1 < grid.size(); ++k)
        if (metric.weight(k) > 0) den = std::max(den, std::abs(F(k)));
    if (den == 0.0) throw DegenerateInputError("field vanishes identically");
    return R.cwiseAbs().maxCoeff() / den;
}

}  // namespace

int harmonic_multiplicity(int n, int l) {
    if (l < 0) throw DomainError("mode degree must be non-negative");
    const int d = n - 1;
    return static_cast<int>(std::llround(binomial(l + d - 1, d - 1) - binomial(l + d - 3, d - 1)));
}

double ModeOperator::spectral_floor(double minimum) const { return std::max(10.0 * h * h * potential_scale, minimum); }

double ModeOperator::energy(const Eigen::VectorXd& v) const {
    const Eigen::Index n = size();
    double acc = boundary_left * v(0) * v(0) + boundary_right * v(n - 1) * v(n - 1);
    acc += (potential.array() * v.array().square()).sum();
    if (n > 1) acc += (-off.array() * (v.tail(n - 1) - v.head(n - 1)).array().square()).sum();
    return acc;
}

ModeOperator build_mode_operator(const ProfileGrid& grid, const RadialMetric& metric, int l,
                                 std::optional<double> S) {
    if (l < 0) throw DomainError("mode degree must be non-negative");
    if (grid.size() < 3) throw DomainError("grid too small for a mode operator");
    const double extent = grid.s(grid.last());
    const double want = S.value_or(extent);
    if (!(want > 0) || want > extent * (1 + 1e-12)) throw DomainError("truncation radius outside the grid");
    const auto kS = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::llround(want / grid.h)),
                                           grid.last() - grid.neck());
    if (kS < 2) throw DomainError("truncation radius below two samples");

    ModeOperator op;
    op.n = grid.n;
    op.l = l;
    op.multiplicity = harmonic_multiplicity(grid.n, l);
    op.h = grid.h;
    op.S = static_cast<double>(kS) * grid.h;
    op.first = grid.is_plane() ? 1 : grid.neck() - kS + 1;
    const Eigen::Index count = grid.is_plane() ? kS - 1 : 2 * kS - 1;
    const int m = grid.sphere_dim();
    const double mu = l * (l + m - 1.0);
    const double h = grid.h;

    op.diag.resize(count);
    op.mass.resize(count);
    op.potential.resize(count);
    op.off.resize(std::max<Eigen::Index>(0, count - 1));
    for (Eigen::Index i = 0; i < count; ++i) {
        const Eigen::Index k = op.first + i;
        const double w = metric.weight(k);
        op.mass(i) = h * w;
        op.potential(i) = h * w * (mu * metric.inv_r2(k) - metric.normsqA(k));
        op.diag(i) = (metric.flux(k - 1) + metric.flux(k)) / h + op.potential(i);
        if (i + 1 < count) op.off(i) = -metric.flux(k) / h;
        op.potential_scale = std::max(op.potential_scale, metric.normsqA(k));
    }
    op.boundary_left = metric.flux(op.first - 1) / h;
    op.boundary_right = metric.flux(op.first + count - 1) / h;
    return op;
}

ModeOperator build_mode_operator(const ProfileGrid& grid, int l, std::optional<double> S) {
    return build_mode_operator(grid, radial_metric(grid), l, S);
}

Eigen::Index count_below(const ModeOperator& op, double sigma) {
    double shift = sigma;
    for (int attempt = 0; attempt < 8; ++attempt) {
        if (auto c = tridiag::count_below<double>(op.diag, op.off, op.mass, shift)) return *c;
        shift = sigma + std::ldexp(std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(sigma)), attempt);
    }
    throw FactorizationError("shifted factorization singular after repeated perturbation");
}

Eigen::Index negative_count(const ModeOperator& op) { return count_below(op, -op.spectral_floor()); }

EigenPairs lowest_eigenpairs(const ProfileGrid& grid, const ModeOperator& op, int count) {
    count = static_cast<int>(std::min<Eigen::Index>(count, op.size()));
    if (count <= 0) return {};
    if (op.size() <= kDirectLimit) return bisection_pairs(op, count);

    const ProfileGrid coarse = coarse_copy(grid, op.S);
    const ModeOperator cop = build_mode_operator(coarse, op.l);
    const EigenPairs guess = bisection_pairs(cop, count);

    EigenPairs out;
    out.values.resize(count);
    out.vectors.resize(op.size(), count);
    for (Eigen::Index j = 0; j < count; ++j) {
        Eigen::VectorXd v = prolong(coarse, cop, guess.vectors.col(j), grid, op);
        double sigma = guess.values(j);
        v = inverse_iteration(op, sigma, std::move(v), out.vectors, j, 1);
        double lam = op.energy(v);
        for (int it = 0; it < 12; ++it) {
            v = inverse_iteration(op, lam, std::move(v), out.vectors, j, 1);
            const double next = op.energy(v);
            const bool done = std::abs(next - lam) <= 1e-10 * std::max(std::abs(next), 1e-6);
            lam = next;
            if (done) break;
        }
        if (!has_index(op, j, lam)) {
            const double lo = tridiag::gershgorin<double>(op.diag, op.off, op.mass).first - 1.0;
            lam = bisect_eigenvalue(op, j, lo, upper_bracket(op, j, lo));
            v = inverse_iteration(op, lam - 1e-13 * std::max(1.0, std::abs(lam)), v, out.vectors, j, 3);
        }
        out.values(j) = lam;
        out.vectors.col(j) = v;
    }
    return out;
}

Eigen::VectorXd dense_spectrum(const ModeOperator& op) {
    const Eigen::Index n = op.size();
    Eigen::VectorXd a = op.diag.cwiseQuotient(op.mass);
    Eigen::VectorXd b(std::max<Eigen::Index>(0, n - 1));
    for (Eigen::Index i = 0; i + 1 < n; ++i) b(i) = op.off(i) / std::sqrt(op.mass(i) * op.mass(i + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(a, b, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

FactorField lift_mode_vector(const ProfileGrid& grid, const ModeOperator& op, const Eigen::VectorXd& v) {
    Eigen::VectorXd radial = Eigen::VectorXd::Zero(grid.size());
    radial.segment(op.first, op.size()) = v;
    FactorField f;
    f.label = "mode " + std::to_string(op.l) + " eigenfunction";
    f.add(mode_monomial(op.l), std::move(radial));
    return f;
}

ModeField translation_field(int i) {
    return {1, [](const ProfileGrid& g) -> Eigen::VectorXd { return -g.zp; },
            "translation e_" + std::to_string(i)};
}

ModeField axial_field() {
    return {0, [](const ProfileGrid& g) -> Eigen::VectorXd { return g.rp; }, "axial translation"};
}

ModeField dilation_field() {
    return {0,
            [](const ProfileGrid& g) -> Eigen::VectorXd {
                return g.z.cwiseProduct(g.rp) - g.r.cwiseProduct(g.zp);
            },
            "dilation"};
}

ModeField constant_field() {
    return {0, [](const ProfileGrid& g) -> Eigen::VectorXd { return Eigen::VectorXd::Ones(g.size()); },
            "constant"};
}

ProfileGrid refined(const ProfileGrid& grid) {
    const Eigen::Index cells = grid.size() - 1;
    if (grid.is_plane()) return make_plane(grid.n, grid.s_max, 2 * cells);
    return solve_profile(grid.n, grid.r0, grid.s_max, cells);  // 2N cells per side
}

JacobiCertificate certify_jacobi_field(const ProfileGrid& grid, const ModeField& field) {
    const Eigen::VectorXd F = field.radial(grid);
    if (F.isZero(0.0)) throw DegenerateInputError("field vanishes identically");
    JacobiCertificate cert;
    cert.residual_sup = relative_residual(grid, field.l, F);
    const ProfileGrid fine = refined(grid);
    cert.residual_refined = relative_residual(fine, field.l, field.radial(fine));
    constexpr double roundoff = 1e-13;
    if (cert.residual_sup <= roundoff && cert.residual_refined <= roundoff) {
        cert.converges = true;
    } else {
        cert.observed_order = observed_order(cert.residual_sup, cert.residual_refined);
        cert.converges = cert.observed_order >= 1.8;
    }

    const PowerTail tail = fit_power_tail(grid, F, false);
    const int m = grid.sphere_dim();
    cert.tail_exponent = tail.vanishing ? -std::numeric_limits<double>::infinity() : tail.exponent;
    cert.is_L2 = tail.vanishing || 2 * tail.exponent + m + 1 < -0.1;
    if (!grid.is_plane()) {
        const PowerTail lower = fit_power_tail(grid, F, true);
        if (!lower.vanishing) cert.is_L2 = cert.is_L2 && 2 * lower.exponent + m + 1 < -0.1;
    }
    if (cert.is_L2) {
        FactorField f;
        f.add(field.l <= 2 ? mode_monomial(field.l) : Monomial{}, F);
        cert.l2_norm = std::sqrt(field_integrals(grid, radial_metric(grid), f).l2);
    } else {
        cert.l2_norm = std::numeric_limits<double>::infinity();
    }
    return cert;
}

std::vector<CertifiedField> nullity_candidates(int n, double r0, SurfaceKind kind) {
    std::vector<CertifiedField> out;
    if (kind == SurfaceKind::plane) {
        // ν = e_n: the horizontal translations and the dilation vanish identically.
        const ProfileGrid grid = make_plane(n, 60.0, 3000);
        const ModeField c = constant_field();
        out.push_back({"axial translation", c.l, 1, certify_jacobi_field(grid, c)});
        return out;
    }
    const ProfileGrid grid = solve_profile(n, r0, 60.0 * r0, 3000);
    for (int i = 1; i < n; ++i) {
        const ModeField t = translation_field(i);
        out.push_back({t.label, t.l, 1, certify_jacobi_field(grid, t)});
    }
    for (const ModeField& f : {axial_field(), dilation_field()})
        out.push_back({f.label, f.l, 1, certify_jacobi_field(grid, f)});
    return out;
}

int nullity_lower_bound(const std::vector<CertifiedField>& candidates) {
    int total = 0;
    for (const auto& c : candidates)
        if (c.certificate.certified()) total += c.multiplicity;
    return total;
}

SpectralReport morse_index(const ProfileGrid& grid, const std::vector<double>& S_sweep,
                           const IndexOptions& options) {
    if (S_sweep.empty()) throw DomainError("empty truncation sweep");
    for (std::size_t i = 1; i < S_sweep.size(); ++i)
        if (!(S_sweep[i] > S_sweep[i - 1])) throw DomainError("truncation sweep must be strictly increasing");

    SpectralReport report;
    report.n = grid.n;
    report.r0 = grid.r0;
    report.kind = grid.kind;
    report.h = grid.h;
    const RadialMetric metric = radial_metric(grid);

    for (double S : S_sweep) {
        SweepEntry entry;
        int positive_run = 0;
        int first_positive = -1;
        for (int l = 0;; ++l) {
            if (l > options.l_max_cap) {
                report.sweep.push_back(entry);
                std::ostringstream os;
                os << "mode cap " << options.l_max_cap << " reached at S = " << S
                   << " without two consecutive positive modes";
                throw InconclusiveError(os.str(), report);
            }
            const ModeOperator op = build_mode_operator(grid, metric, l, S);
            entry.S = op.S;
            const double floor = op.spectral_floor(options.spectral_floor_min);
            entry.spectral_floor = floor;
            ModeResult mode;
            mode.l = l;
            mode.multiplicity = op.multiplicity;
            mode.negative = count_below(op, -floor);
            if (options.eigenvalues_per_mode > 0) {
                const EigenPairs pairs = lowest_eigenpairs(grid, op, options.eigenvalues_per_mode);
                mode.lowest.assign(pairs.values.data(), pairs.values.data() + pairs.values.size());
            }
            entry.index_of_ball += static_cast<long>(mode.multiplicity) * mode.negative;
            const bool positive = mode.negative == 0 && count_below(op, 0.0) == 0;
            entry.modes.push_back(std::move(mode));
            if (positive) {
                if (first_positive < 0) first_positive = l;
                if (++positive_run == 2) break;
            } else {
                positive_run = 0;
                first_positive = -1;
            }
        }
        report.l_stop = std::max(report.l_stop, first_positive);
        report.sweep.push_back(std::move(entry));
    }
    report.morse_index = report.sweep.back().index_of_ball;
    report.stable = report.sweep.size() >= 2 &&
                    report.sweep[report.sweep.size() - 2].index_of_ball == report.morse_index;
    if (options.certify_nullity) {
        report.candidates = nullity_candidates(grid.n, grid.r0, grid.kind);
        report.nullity_lower_bound = nullity_lower_bound(report.candidates);
    }
    return report;
}

ProjectedStability stability_on_complement(const ProfileGrid& grid, const FactorField& f,
                                           const std::vector<FactorField>& eigenfunctions,
                                           long surface_index, double tol) {
    if (eigenfunctions.empty() && surface_index > 0)
        throw PreconditionError("unstable surface but no negative eigenfunctions supplied");
    const RadialMetric metric = radial_metric(grid);
    ProjectedStability out;
    FactorField projected = f;
    for (const auto& e : eigenfunctions) {
        const double overlap = l2_inner(grid, metric, f, e);
        const double norm2 = l2_inner(grid, metric, e, e);
        out.overlaps.push_back(overlap);
        if (overlap != 0.0) projected = projected.plus(e, -overlap / norm2);
    }
    const FieldIntegrals I = field_integrals(grid, metric, projected);
    out.projected_Q = I.q();
    out.remainder_l2 = std::sqrt(std::max(0.0, I.l2));
    if (out.projected_Q <= tol && !projected.is_zero()) out.jacobi_residual = jacobi_residual(grid, metric, projected);
    return out;
}

}  // namespace morselab
