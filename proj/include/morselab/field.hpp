#pragma once

// Functions on a hypersurface of revolution in factorized form
//   f(s, Θ) = Σ_t F_t(s) Y_t(Θ),
// where each Y_t is a monomial in the components of Θ ∈ S^{n-2} ⊂ R^{n-1}.
// Angular integrals are exact (moment formula); only the radial factors are
// discretized.

#include "morselab/geometry.hpp"

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

namespace morselab {

/// Product Θ_{i_1} ... Θ_{i_k}, stored as a sorted index multiset (0-based).
using Monomial = std::vector<int>;

/// Sparse polynomial in Θ.
using AngularPoly = std::map<Monomial, double>;

/// Mean of a monomial over the unit sphere S^{d-1} ⊂ R^d.
double sphere_mean(const Monomial& mono, int d);

/// -Δ_S applied to a monomial, expressed as a polynomial restricted to S^{d-1}.
AngularPoly neg_sphere_laplacian(const Monomial& mono, int d);

/// Mean of p·q over S^{d-1}.
double sphere_mean(const AngularPoly& p, const AngularPoly& q, int d);

Monomial product(const Monomial& a, const Monomial& b);

struct FieldTerm {
    Monomial angular;
    Eigen::VectorXd radial;  // one value per grid sample
};

struct FactorField {
    std::vector<FieldTerm> terms;
    std::string label;

    /// Like monomials are merged into one term.
    FactorField& add(Monomial angular, Eigen::VectorXd radial);
    FactorField scaled(double c) const;
    FactorField plus(const FactorField& other, double c = 1.0) const;
    bool is_zero() const;
};

/// Degree-l harmonic used to lift a mode-l radial profile: 1, Θ_1, Θ_1Θ_2.
/// Degrees above 2 are not representable and throw DomainError.
Monomial mode_monomial(int l);

/// How a radial factor behaves beyond the last sample of each end.
struct PowerTail {
    double coeff = 0;     // F ≈ coeff · r^exponent
    double exponent = 0;
    bool vanishing = true;
};

/// Two-point power-law fit at the end of the grid (outer end for s > 0 or the
/// plane, and the s < 0 end for the catenoid when `lower` is set).
PowerTail fit_power_tail(const ProfileGrid& grid, const Eigen::VectorXd& radial, bool lower);

struct FieldIntegrals {
    double l2 = 0;        // ∫ f²
    double gradient = 0;  // ∫ |∇f|²
    double potential = 0; // ∫ |A|² f²
    double q() const { return gradient - potential; }
};

/// Quadratures of f², |∇f|², |A|² f² over Σ, including analytic power-law
/// tails beyond the grid. Throws IntegrabilityError on a divergent tail.
FieldIntegrals field_integrals(const ProfileGrid& grid, const RadialMetric& metric, const FactorField& f);

/// Q(f, f) = ∫ |∇f|² − |A|² f².
double quadratic_form(const ProfileGrid& grid, const FactorField& f);

/// L² inner product ∫ f g over the grid (trapezoid in s, exact in Θ, no tails).
double l2_inner(const ProfileGrid& grid, const RadialMetric& metric, const FactorField& f,
                const FactorField& g);

/// J f = Δf + |A|² f in factorized form: one radial coefficient per monomial.
/// Interior samples only; end samples are set to zero.
std::map<Monomial, Eigen::VectorXd> jacobi_apply(const ProfileGrid& grid, const RadialMetric& metric,
                                                 const FactorField& f);

/// sup_s Σ_μ |(J f)_μ| / sup_s Σ_μ |f_μ| over interior samples.
double jacobi_residual(const ProfileGrid& grid, const RadialMetric& metric, const FactorField& f);

}  // namespace morselab
