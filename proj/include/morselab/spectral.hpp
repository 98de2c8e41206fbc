#pragma once

// Jacobi operator L = -Δ - |A|² reduced to spherical-harmonic modes. For a
// degree-l harmonic Y on S^{n-2} and f = F(s) Y,
//   L f = [ -r^{2-n} (r^{n-2} F')' + (l(l+n-3)/r² - |A|²) F ] Y,
// discretized with Dirichlet conditions at s = ±S. The index counts
// eigenvalues below zero, so Q(f, f) = ∫ f L f.

#include "morselab/errors.hpp"
#include "morselab/field.hpp"
#include "morselab/geometry.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace morselab {

/// Dimension of degree-l spherical harmonics on S^{n-2}.
int harmonic_multiplicity(int n, int l);

struct ModeOperator {
    int n = 0;
    int l = 0;
    int multiplicity = 0;
    double S = 0;  // truncation radius actually used (snapped to a sample)
    double h = 0;
    Eigen::Index first = 0;  // grid index of the first unknown
    Eigen::VectorXd diag, off, mass;
    Eigen::VectorXd potential;          // h w V per unknown, so diag = coupling + potential
    double boundary_left = 0, boundary_right = 0;  // flux/h into the Dirichlet samples
    double potential_scale = 0;  // max |A|² over the unknowns

    Eigen::Index size() const { return diag.size(); }
    /// ε_spec = max(10 h² scale, minimum).
    double spectral_floor(double minimum = 1e-10) const;
    /// vᵀ K v as a sum of squares of differences (no cancellation).
    double energy(const Eigen::VectorXd& v) const;
};

/// Unknowns are the samples with |s| < S (catenoid) or 0 < s < S (plane);
/// S defaults to the grid extent.
ModeOperator build_mode_operator(const ProfileGrid& grid, const RadialMetric& metric, int l,
                                 std::optional<double> S = std::nullopt);
ModeOperator build_mode_operator(const ProfileGrid& grid, int l, std::optional<double> S = std::nullopt);

/// Generalized eigenvalues strictly below sigma (Sylvester inertia); a zero
/// pivot perturbs the shift and retries, FactorizationError if persistent.
Eigen::Index count_below(const ModeOperator& op, double sigma);

/// Number of eigenvalues below -ε_spec.
Eigen::Index negative_count(const ModeOperator& op);

struct EigenPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;  // columns M-normalized, one entry per unknown
};

/// The `count` lowest generalized eigenpairs. Large problems start from a
/// coarse-grid estimate and finish with Rayleigh quotient iteration; every
/// value is checked against inertia counts before it is returned.
EigenPairs lowest_eigenpairs(const ProfileGrid& grid, const ModeOperator& op, int count);

/// Reference spectrum from a symmetric tridiagonal QR solve of M^{-1/2} K M^{-1/2}.
Eigen::VectorXd dense_spectrum(const ModeOperator& op);

/// Eigenvector (unknown samples only) lifted to a factorized field on the full grid.
FactorField lift_mode_vector(const ProfileGrid& grid, const ModeOperator& op, const Eigen::VectorXd& v);

/// Radial factor of a mode-l field; evaluated afresh on refined grids.
struct ModeField {
    int l = 0;
    std::function<Eigen::VectorXd(const ProfileGrid&)> radial;
    std::string label;
};

ModeField translation_field(int i);  // <e_i, ν> = -z' Θ_i, i < n (1-based)
ModeField axial_field();             // <e_n, ν> = r'
ModeField dilation_field();          // <x, ν> = z r' - r z'
ModeField constant_field();

struct JacobiCertificate {
    double residual_sup = 0;       // on the given grid
    double residual_refined = 0;   // on the grid with h/2
    double observed_order = 0;
    double l2_norm = 0;            // ∞ when not L²
    double tail_exponent = 0;
    bool is_L2 = false;
    bool converges = false;        // order ≥ 1.8 or residual at roundoff
    bool certified() const { return is_L2 && converges; }
};

/// sup |J_l F| / sup |F| at h and h/2, and the L² test via the tail exponent.
JacobiCertificate certify_jacobi_field(const ProfileGrid& grid, const ModeField& field);

/// Same grid with twice as many samples per unit length.
ProfileGrid refined(const ProfileGrid& grid);

struct ModeResult {
    int l = 0;
    int multiplicity = 0;
    Eigen::Index negative = 0;
    std::vector<double> lowest;
};

struct SweepEntry {
    double S = 0;
    std::vector<ModeResult> modes;
    long index_of_ball = 0;
    double spectral_floor = 0;
};

struct CertifiedField {
    std::string label;
    int l = 0;
    int multiplicity = 0;
    JacobiCertificate certificate;
};

struct SpectralReport {
    int n = 0;
    double r0 = 0;
    SurfaceKind kind = SurfaceKind::catenoid;
    double h = 0;
    std::vector<SweepEntry> sweep;
    long morse_index = 0;
    bool stable = false;  // the last two S agree
    int nullity_lower_bound = 0;
    int l_stop = 0;
    std::vector<CertifiedField> candidates;
};

class InconclusiveError : public std::runtime_error {
public:
    InconclusiveError(const std::string& what, SpectralReport partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const SpectralReport& partial() const noexcept { return partial_; }

private:
    SpectralReport partial_;
};

struct IndexOptions {
    int l_max_cap = 12;
    int eigenvalues_per_mode = 2;
    bool certify_nullity = true;
    double spectral_floor_min = 1e-10;  // lower clamp of ε_spec
};

SpectralReport morse_index(const ProfileGrid& grid, const std::vector<double>& S_sweep,
                           const IndexOptions& options = {});

/// Certifies the geometric candidate fields on a moderate grid of the same
/// surface and returns them; the bound counts the certified multiplicities.
std::vector<CertifiedField> nullity_candidates(int n, double r0, SurfaceKind kind);
int nullity_lower_bound(const std::vector<CertifiedField>& candidates);

struct ProjectedStability {
    std::vector<double> overlaps;
    double projected_Q = 0;
    double remainder_l2 = 0;
    std::optional<double> jacobi_residual;  // reported when projected_Q <= tol
};

/// `surface_index` is the index of the surface the eigenfunctions come from;
/// an empty list with a positive index is a PreconditionError.
ProjectedStability stability_on_complement(const ProfileGrid& grid, const FactorField& f,
                                           const std::vector<FactorField>& eigenfunctions,
                                           long surface_index, double tol = 1e-6);

}  // namespace morselab
