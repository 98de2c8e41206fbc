#pragma once

// Test functions f_{ω,ij} = <e_i, ν><V_j, ω> - <e_j, ν><V_i, ω> built from a
// rotationally invariant harmonic 1-form ω = φ'(s) ds, and pointwise checks
// of the differential identities they rest on.
//
// Conventions on the hypersurface x = (r Θ, z):
//   T = (r' Θ, z')   unit profile tangent,  ν = (-z' Θ, r')  unit normal,
//   S(X) = -∂_X ν,   κ_m = z'/r on spherical directions, κ_p = -(n-2) κ_m on T,
//   ξ = g T with g = φ' the dual vector field of ω.
// Coordinates are 1-based (1..n) in the public interface; ambient vectors are
// stored as (R^{n-1} part, axial part).

#include "morselab/field.hpp"
#include "morselab/geometry.hpp"
#include "morselab/harmonic.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace morselab {

/// <e_i, ν> and <V_i, T> (= <e_i, T>) as factorized fields, i = 1..n.
struct ProjectionFields {
    std::vector<FactorField> normal;   // -z' Θ_i (i < n), r' (i = n)
    std::vector<FactorField> tangent;  //  r' Θ_i (i < n), z' (i = n)
};

ProjectionFields coordinate_projection_fields(const ProfileGrid& grid);

/// Ambient vector V_i = e_i - <e_i, ν> ν at sample k, direction Θ.
Eigen::VectorXd projection_vector(const ProfileGrid& grid, Eigen::Index k, const Eigen::VectorXd& theta, int i);

struct TestFunctionField {
    int i = 0, j = 0;
    FactorField field;
    std::string angular_type;  // "Θ_aΘ_b", "Θ_a" or "1"
    double q_value = 0;
    double jacobi_residual = 0;
    double l2 = 0;
    double w12 = 0;
    bool finite = true;
};

/// f_{ω,ij}; i == j is a DomainError. Q, the Jacobi residual and the W^{1,2}
/// norms are filled in.
TestFunctionField test_function(const ProfileGrid& grid, const HarmonicData& omega, int i, int j);

/// Only the factorized field (no quadratures).
FactorField test_function_field(const ProfileGrid& grid, const HarmonicData& omega, int i, int j);

struct W12 {
    double l2 = 0;   // ∫ f²
    double w12 = 0;  // ∫ |∇f|²
    bool finite = true;
};

W12 w12_check(const ProfileGrid& grid, const FactorField& f);

struct QSum {
    double sum = 0;
    std::vector<std::pair<int, int>> pairs;
    std::vector<double> terms;
    std::vector<double> residuals;  // Jacobi residual of each f_{ω,ij}
};

/// Σ_{i<j} Q(f_{ω,ij}, f_{ω,ij}) summed in the fixed pair order.
QSum q_sum(const ProfileGrid& grid, const HarmonicData& omega);

/// A point of Σ given by its arclength (a sample of every grid in a refinement
/// family), a direction Θ and a unit tangent X = a T + (E, 0), E ⊥ Θ.
struct SamplePoint {
    double s = 0;
    Eigen::VectorXd theta;
    double a = 0;
    Eigen::VectorXd E;
};

/// `count` points on samples of `grid`, at least `margin` samples from the
/// ends (and from the axis of the plane), drawn from a seeded generator.
std::vector<SamplePoint> sample_points(const ProfileGrid& grid, int count, std::uint64_t seed, int margin = 3);

enum class PairingSign { corrected, as_printed };

struct IdentityResidual {
    std::string id;
    double sup_residual = 0;
    double h = 0;
};

/// Pointwise residuals of
///   projection_derivative    ∇_X W = <W̄,ν> S(X)
///   normal_gradient          ∇<W̄,ν> = -S(W)
///   normal_jacobi            Δ<W̄,ν> = -|A|² <W̄,ν>
///   pairing_laplacian        Δ<W,ξ> = -2<S W, S ξ> + 2<W̄,ν><A,∇ξ>
///   product_laplacian        Δ(<V̄,ν><W,ξ>) = -|A|² <V̄,ν><W,ξ> + α(V,W,ξ)
///   test_function_laplacian  Δf_{ω,ij} = -|A|² f - 2<∇_{S V_i} ξ, V_j> + 2<∇_{S V_j} ξ, V_i>
/// over all coordinate choices, as sup over the sample set. Radial derivatives
/// are second-order central differences; the right-hand sides use the exact
/// frame. `as_printed` flips the overall sign of the pairing identity.
std::vector<IdentityResidual> lemma_identities_check(const ProfileGrid& grid, const HarmonicData& omega,
                                                     const std::vector<SamplePoint>& samples,
                                                     PairingSign sign = PairingSign::corrected);

/// The test-function identity for one pair (i, j).
double laplace_identity_check(const ProfileGrid& grid, const HarmonicData& omega, int i, int j,
                              const std::vector<SamplePoint>& samples);

struct ClosedFormReduction {
    double c = 0;             // g / z', constant for rotational harmonic ω = g ds
    double sup_in = 0;        // sup_i sup |f_{ω,in} - c <e_i, ν>|, i < n
    double sup_ij = 0;        // sup |f_{ω,ij}|, i < j < n
};

/// f_{ω,in} = c <e_i, ν> and f_{ω,ij} = 0 for i < j < n, checked on every sample.
ClosedFormReduction closed_form_reduction(const ProfileGrid& grid, const HarmonicData& omega);

struct RankReport {
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> ranks;
    int max_rank = 0;
    int required = 0;        // ceil(2h / (n(n-1)))
    bool bound_ok = false;
    int family_rank = 0;     // rank of ω ↦ (f_{ω,ij})_{i<j}
    bool injective = false;  // family_rank == number of forms
};

/// Gram-matrix ranks of {f_{ω_k,ij}}_k; singular values below
/// `threshold` × largest count as zero. Forms sampled on another grid are an
/// InputError.
RankReport projection_rank(const ProfileGrid& grid, const std::vector<HarmonicData>& forms,
                           double threshold = 1e-8);

}  // namespace morselab
