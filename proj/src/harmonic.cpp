#include "morselab/harmonic.hpp"

#include "morselab/errors.hpp"
#include "morselab/numerics.hpp"

#include <cmath>
#include <limits>

namespace morselab {

namespace {

void require_catenoid(const ProfileGrid& grid) {
    if (grid.is_plane()) throw DomainError("bounded harmonic functions need two ends (catenoid grid)");
}

Eigen::Index snap(const ProfileGrid& grid, double S) {
    const auto half = grid.last() - grid.neck();
    const auto kS = static_cast<Eigen::Index>(std::llround(S / grid.h));
    if (!(S > 0) || kS > half) throw DomainError("truncation radius outside the grid");
    if (kS < 1) throw DomainError("truncation radius below one sample");
    return kS;
}

double energy_by_simpson(const ProfileGrid& grid, const Eigen::VectorXd& omega, Eigen::Index lo, Eigen::Index hi) {
    const int m = grid.sphere_dim();
    Eigen::VectorXd integrand(hi - lo + 1);
    for (Eigen::Index k = lo; k <= hi; ++k) integrand(k - lo) = omega(k) * omega(k) * int_pow(grid.r(k), m);
    return sphere_volume(m) * simpson(integrand, grid.h);
}

}  // namespace

HarmonicData truncated_harmonic(const ProfileGrid& grid, double S, std::array<double, 2> end_values) {
    require_catenoid(grid);
    const Eigen::Index kS = snap(grid, S);
    const Eigen::Index lo = grid.neck() - kS, hi = grid.neck() + kS;
    const RadialMetric metric = radial_metric(grid);
    const int m = grid.sphere_dim();
    const double a = end_values[0], b = end_values[1];

    HarmonicData out;
    out.truncation = static_cast<double>(kS) * grid.h;
    out.end_values = end_values;
    out.phi.resize(grid.size());
    out.omega_radial = Eigen::VectorXd::Zero(grid.size());
    const double I = metric.cell_inverse_weight.segment(lo, hi - lo).sum();
    out.inverse_weight_integral = I;
    if (a == b) {
        out.phi.setConstant(a);
        out.trivial = true;
        return out;
    }
    double cum = 0.0;
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
        if (k <= lo) {
            out.phi(k) = a;
        } else if (k >= hi) {
            out.phi(k) = b;
        } else {
            cum += metric.cell_inverse_weight(k - 1);
            out.phi(k) = a + (b - a) * (cum / I);
        }
    }
    for (Eigen::Index k = lo; k <= hi; ++k) out.omega_radial(k) = (b - a) * int_pow(1.0 / grid.r(k), m) / I;
    out.dirichlet_energy = sphere_volume(m) * (b - a) * (b - a) / I;
    out.l2_norm_form = out.dirichlet_energy;
    out.energy_quadrature = energy_by_simpson(grid, out.omega_radial, lo, hi);
    return out;
}

HarmonicData limit_harmonic(const ProfileGrid& grid, bool reversed) {
    require_catenoid(grid);
    if (grid.n < 4)
        throw DivergenceError("∫ r^{2-n} ds diverges for n = 3: no non-constant bounded harmonic function of finite energy");
    const RadialMetric metric = radial_metric(grid);
    const int m = grid.sphere_dim();
    const auto [tail, tail_err] = integrate_to_infinity(
        [&](double r) { return int_pow(1.0 / r, m) / profile_slope(grid, r); }, grid.r(grid.last()));
    (void)tail_err;
    const double I = metric.cell_inverse_weight.sum() + 2.0 * tail;

    HarmonicData out;
    out.truncation = std::numeric_limits<double>::infinity();
    out.inverse_weight_integral = I;
    out.end_values = reversed ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0};
    const double a = out.end_values[0], b = out.end_values[1];
    out.phi.resize(grid.size());
    out.omega_radial.resize(grid.size());
    double cum = tail;
    out.phi(0) = a + (b - a) * (cum / I);
    for (Eigen::Index k = 1; k < grid.size(); ++k) {
        cum += metric.cell_inverse_weight(k - 1);
        out.phi(k) = a + (b - a) * (cum / I);
    }
    for (Eigen::Index k = 0; k < grid.size(); ++k) out.omega_radial(k) = (b - a) * int_pow(1.0 / grid.r(k), m) / I;
    out.dirichlet_energy = sphere_volume(m) * (b - a) * (b - a) / I;
    out.l2_norm_form = out.dirichlet_energy;
    // Grid part by Simpson, tails in closed form against the same tail integral.
    out.energy_quadrature = energy_by_simpson(grid, out.omega_radial, 0, grid.last()) +
                            2.0 * sphere_volume(m) * (b - a) * (b - a) * tail / (I * I);
    return out;
}

FormBasis harmonic_one_form_basis(const ProfileGrid& grid) {
    FormBasis basis;
    basis.function_count = grid.ends();
    basis.dimension = grid.ends() + 0 - 1;  // b1 of the compactification is 0 for both models
    if (!grid.is_plane()) basis.forms.push_back(limit_harmonic(grid));
    return basis;
}

double harmonicity_residual(const ProfileGrid& grid, const HarmonicData& data) {
    const int m = grid.sphere_dim();
    const Eigen::Index size = grid.size();
    double num = 0.0, den = 0.0;
    for (Eigen::Index k = 1; k + 1 < size; ++k) {
        if (std::abs(grid.s(k)) > data.truncation - 0.5 * grid.h) continue;  // kink at ±S
        const double wl = 0.5 * (int_pow(grid.r(k - 1), m) + int_pow(grid.r(k), m));
        const double wr = 0.5 * (int_pow(grid.r(k), m) + int_pow(grid.r(k + 1), m));
        const double fl = wl * (data.phi(k) - data.phi(k - 1)) / grid.h;
        const double fr = wr * (data.phi(k + 1) - data.phi(k)) / grid.h;
        num = std::max(num, std::abs(fr - fl) / grid.h);
        den = std::max(den, std::abs(fr));
    }
    return den > 0 ? num / den : 0.0;
}


HarmonicData coordinate_form(const ProfileGrid& grid) {
    HarmonicData d;
    d.phi = grid.z;
    d.omega_radial = grid.zp;
    d.trivial = grid.is_plane();
    d.dirichlet_energy = d.trivial ? 0.0 : std::numeric_limits<double>::infinity();
    d.energy_quadrature = d.dirichlet_energy;
    d.l2_norm_form = d.dirichlet_energy;
    d.truncation = std::numeric_limits<double>::infinity();
    d.end_values = {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    if (d.trivial) d.end_values = {0.0, 0.0};
    return d;
}

}  // namespace morselab
