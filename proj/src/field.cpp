#include "morselab/field.hpp"

#include "morselab/errors.hpp"
#include "morselab/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace morselab {

namespace {

double double_factorial_odd(int k) {  // (2k-1)!!
    double acc = 1.0;
    for (int j = 1; j <= 2 * k - 1; j += 2) acc *= j;
    return acc;
}

// Collapses repeated monomials, dropping exact zeros.
AngularPoly cleaned(const AngularPoly& p) {
    AngularPoly out;
    for (const auto& [mono, c] : p)
        if (c != 0.0) out[mono] += c;
    return out;
}

// ∫_R^∞ r^a · g(r) dr with g ∈ {1, rp, 1/rp}; the power part is done in closed
// form and only the fast-decaying correction goes through quadrature.
enum class SlopeFactor { none, times, divided };

double tail_power_integral(const ProfileGrid& grid, double a, SlopeFactor factor) {
    if (!(a < -1.0 - 1e-9)) throw IntegrabilityError("tail integral diverges under the power-law model");
    const double R = grid.r(grid.last());
    const double base = std::pow(R, a + 1.0) / (-a - 1.0);
    if (grid.is_plane() || factor == SlopeFactor::none) return base;
    const int m = grid.sphere_dim();
    const double r0 = grid.r0;
    auto correction = [&](double r) {
        const double rp = profile_slope(grid, r);
        const double decay = int_pow(r0 / r, 2 * m);
        const double c = factor == SlopeFactor::times ? -decay / (1.0 + rp) : decay / (rp * (1.0 + rp));
        return std::pow(r, a) * c;
    };
    return base + integrate_to_infinity(correction, R).first;
}

struct PairTail {
    double l2 = 0, gradient = 0, laplace = 0, potential = 0;
};

PairTail pair_tail(const ProfileGrid& grid, const PowerTail& p, const PowerTail& q, bool need_laplace) {
    PairTail t;
    if (p.vanishing || q.vanishing) return t;
    const int m = grid.sphere_dim();
    const double C = p.coeff * q.coeff;
    const double E = p.exponent + q.exponent;
    t.l2 = C * tail_power_integral(grid, E + m, SlopeFactor::divided);
    const double ee = p.exponent * q.exponent;
    if (ee != 0.0) t.gradient = C * ee * tail_power_integral(grid, E + m - 2, SlopeFactor::times);
    if (need_laplace) t.laplace = C * tail_power_integral(grid, E + m - 2, SlopeFactor::divided);
    if (!grid.is_plane()) {
        const double a2 = m * (m + 1.0) * int_pow(grid.r0, 2 * m);
        t.potential = C * a2 * tail_power_integral(grid, E - m - 2, SlopeFactor::divided);
    }
    return t;
}

Eigen::VectorXd trapezoid_weights(const ProfileGrid& grid, const RadialMetric& metric) {
    Eigen::VectorXd w = grid.h * metric.weight;
    if (w.size() > 1) {
        w(0) *= 0.5;
        w(w.size() - 1) *= 0.5;
    }
    return w;
}

}  // namespace

double sphere_mean(const Monomial& mono, int d) {
    if (mono.empty()) return 1.0;
    double num = 1.0;
    std::size_t i = 0;
    while (i < mono.size()) {
        std::size_t j = i;
        while (j < mono.size() && mono[j] == mono[i]) ++j;
        const auto count = static_cast<int>(j - i);
        if (count % 2) return 0.0;
        num *= double_factorial_odd(count / 2);
        i = j;
    }
    const int K = static_cast<int>(mono.size()) / 2;
    double den = 1.0;
    for (int j = 0; j < K; ++j) den *= d + 2.0 * j;
    return num / den;
}

Monomial product(const Monomial& a, const Monomial& b) {
    Monomial out(a);
    out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end());
    return out;
}

AngularPoly neg_sphere_laplacian(const Monomial& mono, int d) {
    // For P homogeneous of degree k: Δ_R P = Δ_S P + k(k+d-2) P on the sphere.
    const int k = static_cast<int>(mono.size());
    AngularPoly out;
    if (k == 0) return out;
    out[mono] = k * (k + d - 2.0);
    std::size_t i = 0;
    while (i < mono.size()) {
        std::size_t j = i;
        while (j < mono.size() && mono[j] == mono[i]) ++j;
        const auto count = static_cast<int>(j - i);
        if (count >= 2) {
            Monomial reduced(mono);
            reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(i),
                          reduced.begin() + static_cast<std::ptrdiff_t>(i + 2));
            out[reduced] -= count * (count - 1.0);
        }
        i = j;
    }
    return cleaned(out);
}

double sphere_mean(const AngularPoly& p, const AngularPoly& q, int d) {
    double acc = 0.0;
    for (const auto& [a, ca] : p)
        for (const auto& [b, cb] : q) acc += ca * cb * sphere_mean(product(a, b), d);
    return acc;
}

FactorField& FactorField::add(Monomial angular, Eigen::VectorXd radial) {
    std::sort(angular.begin(), angular.end());
    for (auto& t : terms)
        if (t.angular == angular && t.radial.size() == radial.size()) {
            t.radial += radial;
            return *this;
        }
    terms.push_back({std::move(angular), std::move(radial)});
    return *this;
}

FactorField FactorField::scaled(double c) const {
    FactorField out = *this;
    for (auto& t : out.terms) t.radial *= c;
    return out;
}

FactorField FactorField::plus(const FactorField& other, double c) const {
    FactorField out = *this;
    for (const auto& t : other.terms) out.add(t.angular, c * t.radial);
    return out;
}

bool FactorField::is_zero() const {
    return std::all_of(terms.begin(), terms.end(), [](const FieldTerm& t) { return t.radial.isZero(0.0); });
}

Monomial mode_monomial(int l) {
    switch (l) {
        case 0: return {};
        case 1: return {0};
        case 2: return {0, 1};
        default: throw DomainError("mode lift is only available for l <= 2");
    }
}

PowerTail fit_power_tail(const ProfileGrid& grid, const Eigen::VectorXd& radial, bool lower) {
    PowerTail tail;
    const Eigen::Index end = lower ? 0 : grid.last();
    const Eigen::Index step = lower ? 1 : -1;
    const double fe = radial(end);
    if (fe == 0.0) return tail;
    const double re = grid.r(end);
    Eigen::Index inner = end + step;
    while (inner != grid.neck() && grid.r(inner) > 0.8 * re) inner += step;
    const double fi = radial(inner), ri = grid.r(inner);
    if (!(ri > 0) || ri == re || fi == 0.0 || (fi > 0) != (fe > 0))
        throw IntegrabilityError("radial factor does not follow a power law near the end");
    tail.vanishing = false;
    tail.exponent = std::log(fe / fi) / std::log(re / ri);
    tail.coeff = fe / std::pow(re, tail.exponent);
    return tail;
}

FieldIntegrals field_integrals(const ProfileGrid& grid, const RadialMetric& metric, const FactorField& f) {
    const int d = grid.n - 1;
    const double vol = sphere_volume(grid.sphere_dim());
    const Eigen::VectorXd tw = trapezoid_weights(grid, metric);
    const Eigen::Index cells = grid.size() - 1;

    std::vector<std::vector<PowerTail>> tails(f.terms.size());
    for (std::size_t p = 0; p < f.terms.size(); ++p) {
        tails[p].push_back(fit_power_tail(grid, f.terms[p].radial, false));
        if (!grid.is_plane()) tails[p].push_back(fit_power_tail(grid, f.terms[p].radial, true));
    }

    FieldIntegrals out;
    for (std::size_t p = 0; p < f.terms.size(); ++p) {
        const auto& Fp = f.terms[p].radial;
        const AngularPoly Yp{{f.terms[p].angular, 1.0}};
        for (std::size_t q = 0; q < f.terms.size(); ++q) {
            const auto& Fq = f.terms[q].radial;
            const double ang = sphere_mean(product(f.terms[p].angular, f.terms[q].angular), d);
            const double lap = sphere_mean(Yp, neg_sphere_laplacian(f.terms[q].angular, d), d);
            if (ang == 0.0 && lap == 0.0) continue;

            const Eigen::ArrayXd prod = Fp.array() * Fq.array();
            const double N = (tw.array() * prod).sum();
            const double P = (tw.array() * metric.inv_r2.array() * prod).sum();
            const double A = (tw.array() * metric.normsqA.array() * prod).sum();
            const Eigen::ArrayXd dp = Fp.tail(cells) - Fp.head(cells);
            const Eigen::ArrayXd dq = Fq.tail(cells) - Fq.head(cells);
            const double G = (metric.flux.array() * dp * dq).sum() / grid.h;

            double tN = 0, tG = 0, tP = 0, tA = 0;
            for (std::size_t e = 0; e < tails[p].size(); ++e) {
                const PairTail t = pair_tail(grid, tails[p][e], tails[q][e], lap != 0.0);
                tN += t.l2;
                tG += t.gradient;
                tP += t.laplace;
                tA += t.potential;
            }
            out.l2 += vol * ang * (N + tN);
            out.gradient += vol * (ang * (G + tG) + lap * (P + tP));
            out.potential += vol * ang * (A + tA);
        }
    }
    return out;
}

double quadratic_form(const ProfileGrid& grid, const FactorField& f) {
    return field_integrals(grid, radial_metric(grid), f).q();
}

double l2_inner(const ProfileGrid& grid, const RadialMetric& metric, const FactorField& f,
                const FactorField& g) {
    const int d = grid.n - 1;
    const Eigen::VectorXd tw = trapezoid_weights(grid, metric);
    double acc = 0.0;
    for (const auto& a : f.terms)
        for (const auto& b : g.terms) {
            const double ang = sphere_mean(product(a.angular, b.angular), d);
            if (ang != 0.0) acc += ang * (tw.array() * a.radial.array() * b.radial.array()).sum();
        }
    return sphere_volume(grid.sphere_dim()) * acc;
}

std::map<Monomial, Eigen::VectorXd> jacobi_apply(const ProfileGrid& grid, const RadialMetric& metric,
                                                 const FactorField& f) {
    const int d = grid.n - 1;
    const Eigen::Index size = grid.size();
    const double h2 = grid.h * grid.h;
    std::map<Monomial, Eigen::VectorXd> out;
    auto slot = [&](const Monomial& mono) -> Eigen::VectorXd& {
        auto it = out.find(mono);
        if (it == out.end()) it = out.emplace(mono, Eigen::VectorXd::Zero(size)).first;
        return it->second;
    };
    for (const auto& t : f.terms) {
        const auto& F = t.radial;
        Eigen::VectorXd& own = slot(t.angular);
        const AngularPoly lap = neg_sphere_laplacian(t.angular, d);
        for (Eigen::Index k = 1; k + 1 < size; ++k) {
            if (metric.weight(k) == 0.0) continue;
            const double div = (metric.flux(k) * (F(k + 1) - F(k)) - metric.flux(k - 1) * (F(k) - F(k - 1))) /
                               (h2 * metric.weight(k));
            own(k) += div + metric.normsqA(k) * F(k);
        }
        for (const auto& [mono, c] : lap) {
            Eigen::VectorXd& dst = slot(mono);
            for (Eigen::Index k = 1; k + 1 < size; ++k) dst(k) -= c * F(k) * metric.inv_r2(k);
        }
    }
    return out;
}

double jacobi_residual(const ProfileGrid& grid, const RadialMetric& metric, const FactorField& f) {
    const auto Jf = jacobi_apply(grid, metric, f);
    std::map<Monomial, Eigen::VectorXd> collected;
    for (const auto& t : f.terms) {
        auto it = collected.find(t.angular);
        if (it == collected.end()) collected.emplace(t.angular, t.radial);
        else it->second += t.radial;
    }
    const Eigen::Index size = grid.size();
    double num = 0.0, den = 0.0;
    for (Eigen::Index k = 1; k + 1 < size; ++k) {
        if (metric.weight(k) == 0.0) continue;
        double a = 0.0, b = 0.0;
        for (const auto& [mono, v] : Jf) a += std::abs(v(k));
        for (const auto& [mono, v] : collected) b += std::abs(v(k));
        num = std::max(num, a);
        den = std::max(den, b);
    }
    if (den == 0.0) throw DegenerateInputError("field vanishes identically");
    return num / den;
}

}  // namespace morselab
