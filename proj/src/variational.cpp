#include "morselab/variational.hpp"

#include "morselab/errors.hpp"
#include "morselab/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace morselab {

namespace {

using Vec = Eigen::VectorXd;

Monomial coordinate_monomial(int i, int n) { return i < n ? Monomial{i - 1} : Monomial{}; }

void check_index(int i, int n) {
    if (i < 1 || i > n) throw DomainError("coordinate index outside 1..n");
}

Vec radial_or_zero(const ProfileGrid& grid, const HarmonicData& omega) {
    if (omega.omega_radial.size() == 0) return Vec::Zero(grid.size());
    if (omega.omega_radial.size() != grid.size()) throw InputError("harmonic form sampled on a different grid");
    return omega.omega_radial;
}

double eval(const Monomial& mono, const Vec& theta) {
    double v = 1.0;
    for (int a : mono) v *= theta(a);
    return v;
}

double eval(const AngularPoly& p, const Vec& theta) {
    double v = 0.0;
    for (const auto& [mono, c] : p) v += c * eval(mono, theta);
    return v;
}

// Tangential (spherical) gradient of a monomial at Θ, in R^{n-1}.
Vec sphere_gradient(const Monomial& mono, const Vec& theta) {
    Vec g = Vec::Zero(theta.size());
    for (std::size_t p = 0; p < mono.size(); ++p) {
        double rest = 1.0;
        for (std::size_t q = 0; q < mono.size(); ++q)
            if (q != p) rest *= theta(mono[q]);
        g(mono[p]) += rest;
    }
    return g - g.dot(theta) * theta;
}

struct Frame {
    int n = 0, m = 0;
    double r = 0, rp = 0, zp = 0, km = 0, kp = 0, A2 = 0;
    Vec theta, T, nu;

    Vec embed(const Vec& horizontal, double axial) const {
        Vec v(n);
        v.head(n - 1) = horizontal;
        v(n - 1) = axial;
        return v;
    }
    Vec e(int i) const { return Vec::Unit(n, i - 1); }
    double nu_comp(int i) const { return nu(i - 1); }
    Vec projection(int i) const { return e(i) - nu_comp(i) * nu; }
    Vec shape(const Vec& X) const {
        const double t = X.dot(T);
        return kp * t * T + km * (X - t * T);
    }
    // ∇_Y ξ for ξ = g T.
    Vec nabla_xi(double g, double gp, const Vec& Y) const {
        const double t = Y.dot(T);
        return gp * t * T + g * (rp / r) * (Y - t * T);
    }
    double A_dot_nabla_xi(double g, double gp) const { return kp * gp + m * km * g * rp / r; }
};

Eigen::Index node_of(const ProfileGrid& grid, double s) {
    const double offset = grid.is_plane() ? s / grid.h : s / grid.h + static_cast<double>(grid.neck());
    const auto k = static_cast<Eigen::Index>(std::llround(offset));
    if (k < 0 || k > grid.last() || std::abs(grid.s(k) - s) > 1e-9 * grid.h)
        throw DomainError("sample point is not a grid sample");
    if (k < 2 || k > grid.last() - 2 || (grid.is_plane() && k < 2))
        throw RangeError("sample point within the stencil width of the grid boundary");
    return k;
}

Frame frame(const ProfileGrid& grid, Eigen::Index k, const Vec& theta) {
    Frame f;
    f.n = grid.n;
    f.m = grid.sphere_dim();
    f.r = grid.r(k);
    f.rp = grid.rp(k);
    f.zp = grid.zp(k);
    const GeometryFrame g = frame_at(grid, k);
    f.km = g.kappa_m;
    f.kp = g.kappa_p;
    f.A2 = g.normsqA;
    f.theta = theta;
    f.T = f.embed(f.rp * theta, f.zp);
    f.nu = f.embed(-f.zp * theta, f.rp);
    return f;
}

double d1(const Vec& F, Eigen::Index k, double h) { return (F(k + 1) - F(k - 1)) / (2 * h); }
double d2(const Vec& F, Eigen::Index k, double h) { return (F(k + 1) - 2 * F(k) + F(k - 1)) / (h * h); }

struct Jet {
    double value = 0;
    Vec grad;
    double laplacian = 0;
};

// Value, gradient and Laplacian of a factorized function at (s_k, Θ), with
// central differences in s and exact angular calculus.
Jet jet(const ProfileGrid& grid, const FactorField& f, Eigen::Index k, const Frame& fr) {
    const int d = grid.n - 1;
    Jet out;
    out.grad = Vec::Zero(grid.n);
    for (const auto& t : f.terms) {
        const double F0 = t.radial(k), F1 = d1(t.radial, k, grid.h), F2 = d2(t.radial, k, grid.h);
        const double Y = eval(t.angular, fr.theta);
        out.value += F0 * Y;
        out.grad += F1 * Y * fr.T + (F0 / fr.r) * fr.embed(sphere_gradient(t.angular, fr.theta), 0.0);
        out.laplacian += (F2 + fr.m * (fr.rp / fr.r) * F1) * Y -
                         F0 / (fr.r * fr.r) * eval(neg_sphere_laplacian(t.angular, d), fr.theta);
    }
    return out;
}

FactorField single(Monomial mono, Vec radial) {
    FactorField f;
    f.add(std::move(mono), std::move(radial));
    return f;
}

FactorField product_field(const FieldTerm& a, const FieldTerm& b, const Vec& g) {
    return single(product(a.angular, b.angular), a.radial.cwiseProduct(b.radial).cwiseProduct(g));
}

struct IdentityContext {
    const ProfileGrid& grid;
    ProjectionFields proj;
    Vec g;
};

// Test-function identity residual at one sample for one pair.
double test_function_residual(const IdentityContext& c, const HarmonicData& omega, int i, int j, Eigen::Index k,
                              const Frame& fr, double g, double gp) {
    const FactorField f = test_function_field(c.grid, omega, i, j);
    const Jet J = jet(c.grid, f, k, fr);
    const Vec Vi = fr.projection(i), Vj = fr.projection(j);
    const double rhs = -fr.A2 * J.value - 2 * fr.nabla_xi(g, gp, fr.shape(Vi)).dot(Vj) +
                       2 * fr.nabla_xi(g, gp, fr.shape(Vj)).dot(Vi);
    return std::abs(J.laplacian - rhs);
}

}  // namespace

ProjectionFields coordinate_projection_fields(const ProfileGrid& grid) {
    ProjectionFields out;
    for (int i = 1; i <= grid.n; ++i) {
        const Monomial mono = coordinate_monomial(i, grid.n);
        out.normal.push_back(single(mono, i < grid.n ? Vec(-grid.zp) : Vec(grid.rp)));
        out.tangent.push_back(single(mono, i < grid.n ? Vec(grid.rp) : Vec(grid.zp)));
        out.normal.back().label = "<e_" + std::to_string(i) + ", nu>";
        out.tangent.back().label = "<V_" + std::to_string(i) + ", T>";
    }
    return out;
}

Eigen::VectorXd projection_vector(const ProfileGrid& grid, Eigen::Index k, const Eigen::VectorXd& theta, int i) {
    check_index(i, grid.n);
    return frame(grid, k, theta).projection(i);
}

FactorField test_function_field(const ProfileGrid& grid, const HarmonicData& omega, int i, int j) {
    check_index(i, grid.n);
    check_index(j, grid.n);
    if (i == j) throw DomainError("test function needs i != j");
    const Vec g = radial_or_zero(grid, omega);
    const int n = grid.n;
    const Vec nu_i = i < n ? Vec(-grid.zp) : Vec(grid.rp);
    const Vec nu_j = j < n ? Vec(-grid.zp) : Vec(grid.rp);
    const Vec t_i = i < n ? Vec(grid.rp) : Vec(grid.zp);
    const Vec t_j = j < n ? Vec(grid.rp) : Vec(grid.zp);
    const Vec a = nu_i.cwiseProduct(t_j).cwiseProduct(g);
    const Vec b = nu_j.cwiseProduct(t_i).cwiseProduct(g);
    FactorField f = single(product(coordinate_monomial(i, n), coordinate_monomial(j, n)), a - b);
    f.label = "f_{" + std::to_string(i) + std::to_string(j) + "}";
    return f;
}

W12 w12_check(const ProfileGrid& grid, const FactorField& f) {
    W12 out;
    try {
        const FieldIntegrals I = field_integrals(grid, radial_metric(grid), f);
        out.l2 = I.l2;
        out.w12 = I.gradient;
    } catch (const IntegrabilityError&) {
        out.finite = false;
        out.l2 = out.w12 = std::numeric_limits<double>::infinity();
    }
    return out;
}

TestFunctionField test_function(const ProfileGrid& grid, const HarmonicData& omega, int i, int j) {
    TestFunctionField t;
    t.i = i;
    t.j = j;
    t.field = test_function_field(grid, omega, i, j);
    const int n = grid.n;
    t.angular_type = (i < n && j < n) ? "Θ_aΘ_b" : "Θ_a";
    const RadialMetric metric = radial_metric(grid);
    try {
        const FieldIntegrals I = field_integrals(grid, metric, t.field);
        t.q_value = I.q();
        t.l2 = I.l2;
        t.w12 = I.gradient;
    } catch (const IntegrabilityError&) {
        t.finite = false;
        t.q_value = t.l2 = t.w12 = std::numeric_limits<double>::infinity();
    }
    t.jacobi_residual = t.field.is_zero() ? 0.0 : jacobi_residual(grid, metric, t.field);
    return t;
}

QSum q_sum(const ProfileGrid& grid, const HarmonicData& omega) {
    if (!(omega.l2_norm_form < std::numeric_limits<double>::infinity()))
        throw IntegrabilityError("harmonic form is not L²");
    QSum out;
    for (int i = 1; i <= grid.n; ++i)
        for (int j = i + 1; j <= grid.n; ++j) {
            const TestFunctionField t = test_function(grid, omega, i, j);
            if (!t.finite) throw IntegrabilityError("test function is not in W^{1,2}");
            out.pairs.emplace_back(i, j);
            out.terms.push_back(t.q_value);
            out.residuals.push_back(t.jacobi_residual);
            out.sum += t.q_value;
        }
    return out;
}

std::vector<SamplePoint> sample_points(const ProfileGrid& grid, int count, std::uint64_t seed, int margin) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int d = grid.n - 1;
    Eigen::Index lo, hi;
    if (grid.is_plane()) {
        lo = margin;
        hi = grid.last() - margin;
    } else {
        const Eigen::Index half = grid.last() - grid.neck();
        lo = -(half - margin);
        hi = half - margin;
    }
    if (hi < lo) throw RangeError("grid too small for the requested sample margin");
    std::uniform_int_distribution<Eigen::Index> pick(lo, hi);
    std::vector<SamplePoint> out;
    for (int c = 0; c < count; ++c) {
        SamplePoint p;
        p.s = static_cast<double>(pick(rng)) * grid.h;
        p.theta.resize(d);
        for (int a = 0; a < d; ++a) p.theta(a) = normal(rng);
        p.theta.normalize();
        p.E.resize(d);
        for (int a = 0; a < d; ++a) p.E(a) = normal(rng);
        p.E -= p.E.dot(p.theta) * p.theta;
        p.a = normal(rng);
        const double norm = std::sqrt(p.a * p.a + p.E.squaredNorm());
        p.a /= norm;
        p.E /= norm;
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<IdentityResidual> lemma_identities_check(const ProfileGrid& grid, const HarmonicData& omega,
                                                     const std::vector<SamplePoint>& samples, PairingSign sign) {
    const int n = grid.n;
    const double h = grid.h;
    IdentityContext ctx{grid, coordinate_projection_fields(grid), radial_or_zero(grid, omega)};
    double r1 = 0, r2 = 0, r3 = 0, r4 = 0, r5 = 0, r6 = 0;
    const double pairing_sign = sign == PairingSign::corrected ? 1.0 : -1.0;

    for (const auto& p : samples) {
        const Eigen::Index k = node_of(grid, p.s);
        const Frame fr = frame(grid, k, p.theta);
        const double g = ctx.g(k), gp = d1(ctx.g, k, h);
        const Vec X = p.a * fr.T + fr.embed(p.E, 0.0);
        const Vec xi = g * fr.T;
        const Vec Sxi = fr.shape(xi);
        const double Axi = fr.A_dot_nabla_xi(g, gp);

        // ∂_s ν and ∂_E ν (E a spherical tangent of length |E|: dΘ = E / r).
        const double zpp = d1(grid.zp, k, h), rpp = d1(grid.rp, k, h);
        const Vec dnu_s = fr.embed(-zpp * p.theta, rpp);
        const Vec dnu_E = fr.embed(-fr.zp * p.E / fr.r, 0.0);
        const Vec dnu_X = p.a * dnu_s + dnu_E;

        for (int w = 1; w <= n; ++w) {
            const double nw = fr.nu_comp(w);
            const Vec W = fr.projection(w);

            // projection_derivative
            const double dnw_X = w < n ? p.a * (-zpp * p.theta(w - 1)) - fr.zp * p.E(w - 1) / fr.r : p.a * rpp;
            Vec dW = -dnw_X * fr.nu - nw * dnu_X;
            dW -= dW.dot(fr.nu) * fr.nu;
            r1 = std::max(r1, (dW - nw * fr.shape(X)).norm());

            // normal_gradient and normal_jacobi
            const Jet N = jet(grid, ctx.proj.normal[w - 1], k, fr);
            r2 = std::max(r2, (N.grad + fr.shape(W)).norm());
            r3 = std::max(r3, std::abs(N.laplacian + fr.A2 * nw));

            // pairing_laplacian
            const FactorField pairing = product_field(
                {ctx.proj.tangent[w - 1].terms[0].angular, ctx.proj.tangent[w - 1].terms[0].radial},
                {Monomial{}, Vec::Ones(grid.size())}, ctx.g);
            const Jet P = jet(grid, pairing, k, fr);
            const double rhs4 = pairing_sign * (-2 * fr.shape(W).dot(Sxi) + 2 * nw * Axi);
            r4 = std::max(r4, std::abs(P.laplacian - rhs4));

            // product_laplacian, every V
            for (int v = 1; v <= n; ++v) {
                const double nv = fr.nu_comp(v);
                const Vec V = fr.projection(v);
                const FactorField prod =
                    product_field(ctx.proj.normal[v - 1].terms[0], ctx.proj.tangent[w - 1].terms[0], ctx.g);
                const Jet Q = jet(grid, prod, k, fr);
                const double alpha = -2 * nv * fr.shape(W).dot(Sxi) - 2 * nw * fr.shape(V).dot(Sxi) +
                                     2 * nv * nw * Axi - 2 * fr.nabla_xi(g, gp, fr.shape(V)).dot(W);
                r5 = std::max(r5, std::abs(Q.laplacian - (-fr.A2 * Q.value + alpha)));
            }
        }
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                r6 = std::max(r6, test_function_residual(ctx, omega, i, j, k, fr, g, gp));
    }
    return {{"projection_derivative", r1, h},   {"normal_gradient", r2, h},
            {"normal_jacobi", r3, h},           {"pairing_laplacian", r4, h},
            {"product_laplacian", r5, h},       {"test_function_laplacian", r6, h}};
}

double laplace_identity_check(const ProfileGrid& grid, const HarmonicData& omega, int i, int j,
                              const std::vector<SamplePoint>& samples) {
    IdentityContext ctx{grid, coordinate_projection_fields(grid), radial_or_zero(grid, omega)};
    double res = 0;
    for (const auto& p : samples) {
        const Eigen::Index k = node_of(grid, p.s);
        const Frame fr = frame(grid, k, p.theta);
        res = std::max(res, test_function_residual(ctx, omega, i, j, k, fr, ctx.g(k), d1(ctx.g, k, grid.h)));
    }
    return res;
}

RankReport projection_rank(const ProfileGrid& grid, const std::vector<HarmonicData>& forms, double threshold) {
    if (forms.empty()) throw DegenerateInputError("empty family of forms");
    for (const auto& w : forms)
        if (w.omega_radial.size() != grid.size()) throw InputError("forms sampled on different grids");
    const int n = grid.n;
    const auto H = static_cast<Eigen::Index>(forms.size());
    const RadialMetric metric = radial_metric(grid);

    auto rank_of = [threshold](const Eigen::MatrixXd& gram) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd sv = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        const double top = sv.maxCoeff();
        if (!(top > 0)) return 0;
        return static_cast<int>((sv.array() > threshold * top).count());
    };
    auto inner = [&](const FactorField& a, const FactorField& b) {
        const double plus = field_integrals(grid, metric, a.plus(b)).l2;
        const double minus = field_integrals(grid, metric, a.plus(b, -1.0)).l2;
        return 0.25 * (plus - minus);
    };

    RankReport out;
    Eigen::MatrixXd family = Eigen::MatrixXd::Zero(H, H);
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            std::vector<FactorField> fs;
            for (const auto& w : forms) fs.push_back(test_function_field(grid, w, i, j));
            Eigen::MatrixXd gram(H, H);
            for (Eigen::Index a = 0; a < H; ++a)
                for (Eigen::Index b = a; b < H; ++b) gram(a, b) = gram(b, a) = inner(fs[a], fs[b]);
            family += gram;
            out.pairs.emplace_back(i, j);
            out.ranks.push_back(rank_of(gram));
            out.max_rank = std::max(out.max_rank, out.ranks.back());
        }
    const long num = 2 * H, den = static_cast<long>(n) * (n - 1);
    out.required = static_cast<int>((num + den - 1) / den);
    out.bound_ok = out.max_rank >= out.required;
    out.family_rank = rank_of(family);
    out.injective = out.family_rank == H;
    return out;
}


ClosedFormReduction closed_form_reduction(const ProfileGrid& grid, const HarmonicData& omega) {
    if (grid.is_plane()) throw DomainError("the reduction needs a catenoid grid");
    const Eigen::Index mid = grid.neck();
    ClosedFormReduction out;
    out.c = omega.omega_radial(mid) / grid.zp(mid);
    const ProjectionFields P = coordinate_projection_fields(grid);
    auto sup = [](const FactorField& f) {
        double m = 0;
        for (const auto& t : f.terms) m = std::max(m, t.radial.cwiseAbs().maxCoeff());
        return m;
    };
    const int n = grid.n;
    for (int i = 1; i < n; ++i) {
        const FactorField f = test_function_field(grid, omega, i, n);
        out.sup_in = std::max(out.sup_in, sup(f.plus(P.normal[i - 1], -out.c)));
        for (int j = i + 1; j < n; ++j) out.sup_ij = std::max(out.sup_ij, sup(test_function_field(grid, omega, i, j)));
    }
    return out;
}

}  // namespace morselab
