#pragma once

// Rotationally invariant harmonic functions on the catenoid: solutions of
// (r^{n-2} φ')' = 0, i.e. φ' ∝ r^{2-n}, and their differentials.

#include "morselab/geometry.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace morselab {

struct HarmonicData {
    Eigen::VectorXd phi;           // on every grid sample; constant beyond ±S
    Eigen::VectorXd omega_radial;  // dφ/ds
    double dirichlet_energy = 0;   // exact for the discrete profile: Vol (b-a)² / ∫ r^{2-n}
    double energy_quadrature = 0;  // independent Simpson quadrature of Vol ∫ φ'² r^{n-2}
    double l2_norm_form = 0;       // ∫ |ω|², equal to the energy
    double truncation = 0;         // S, or +∞ for the limit object
    std::array<double, 2> end_values{0.0, 1.0};  // at s → -S and s → +S
    bool trivial = false;
    double inverse_weight_integral = 0;  // ∫_{-S}^{S} r^{2-n} ds
};

/// Dirichlet problem on [-S, S] with φ(-S) = end_values[0], φ(S) = end_values[1].
HarmonicData truncated_harmonic(const ProfileGrid& grid, double S, std::array<double, 2> end_values = {0.0, 1.0});

/// S → ∞ limit with end values {0, 1} (or {1, 0} when `reversed`); requires
/// n ≥ 4 and throws DivergenceError for n = 3.
HarmonicData limit_harmonic(const ProfileGrid& grid, bool reversed = false);

/// ω = dz: the coordinate form, harmonic but not L² (energy reported as +∞).
HarmonicData coordinate_form(const ProfileGrid& grid);

struct FormBasis {
    int function_count = 0;  // bounded harmonic functions, constants included (= #ends)
    int dimension = 0;       // #ends + b1 - 1
    std::vector<HarmonicData> forms;
};

FormBasis harmonic_one_form_basis(const ProfileGrid& grid);

/// sup |(r^{n-2} φ')'| / sup |r^{n-2} φ'| with a centered stencil that does
/// not reuse the construction's cell integrals.
double harmonicity_residual(const ProfileGrid& grid, const HarmonicData& data);

}  // namespace morselab
