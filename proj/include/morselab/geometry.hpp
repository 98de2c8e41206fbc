#pragma once

// Minimal hypersurfaces of revolution in R^n: the n-dimensional catenoid
// x = (r(s) Θ, z(s)), Θ ∈ S^{n-2}, parametrized by profile arclength s, and
// the hyperplane in the same radial format (r = s, z = 0, s >= 0).

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <utility>

namespace morselab {

enum class SurfaceKind { catenoid, plane };

std::string to_string(SurfaceKind kind);
SurfaceKind surface_kind_from_string(const std::string& name);

struct ProfileGrid {
    int n = 4;
    double r0 = 1.0;  // neck radius; 0 for the plane
    double h = 0.0;
    double s_max = 0.0;
    SurfaceKind kind = SurfaceKind::catenoid;
    Eigen::VectorXd s, r, z, rp, zp;

    Eigen::Index size() const { return s.size(); }
    /// Index of the sample at s = 0 (the neck, or the axis point of the plane).
    Eigen::Index neck() const { return kind == SurfaceKind::catenoid ? size() / 2 : 0; }
    Eigen::Index last() const { return size() - 1; }
    int sphere_dim() const { return n - 2; }
    int ends() const { return kind == SurfaceKind::catenoid ? 2 : 1; }
    bool in_theorem_regime() const { return n >= 4 && n <= 7; }
    bool is_plane() const { return kind == SurfaceKind::plane; }
};

struct GeometryFrame {
    double kappa_m = 0;          // spherical directions, multiplicity n-2
    double kappa_p = 0;          // profile direction
    double normsqA = 0;          // |A|^2
    double nu_axis = 1;          // <e_n, nu>
    double nu_radial_coeff = 0;  // <e_i, nu> = c Θ_i for i < n
    double weight = 0;           // r^{n-2}
};

/// Catenoid profile on [-s_max, s_max] with 2N+1 uniformly spaced samples.
/// Throws DomainError on bad parameters and ConsistencyError when the
/// constructed grid violates its invariants.
ProfileGrid solve_profile(int n, double r0, double s_max, Eigen::Index N);

/// Hyperplane on [0, s_max] with N+1 samples.
ProfileGrid make_plane(int n, double s_max, Eigen::Index N);

/// Throws ConsistencyError naming the first violated invariant.
void check_invariants(const ProfileGrid& grid);

GeometryFrame frame_at(const ProfileGrid& grid, Eigen::Index idx);

/// dr/ds as a function of r on the outer part of the profile.
double profile_slope(const ProfileGrid& grid, double r);

/// Principal curvatures at a sample: n-2 copies of kappa_m then kappa_p.
Eigen::VectorXd principal_curvatures(const ProfileGrid& grid, Eigen::Index idx);

/// Per-sample coefficients of the radially reduced Jacobi operator.
struct RadialMetric {
    Eigen::VectorXd weight;      // r^{n-2}
    Eigen::VectorXd flux;        // per cell: h / ∫_cell r^{2-n} ds (0 across the axis)
    Eigen::VectorXd cell_inverse_weight;  // per cell: ∫_cell r^{2-n} ds
    Eigen::VectorXd normsqA;     // |A|^2
    Eigen::VectorXd inv_r2;      // 1/r^2, 0 on the axis
};

RadialMetric radial_metric(const ProfileGrid& grid);

/// ∫_R^∞ f(r) dr via the substitution t = R/r and Gauss-Legendre on (0, 1].
/// Returns {value, error estimate}.
std::pair<double, double> integrate_to_infinity(const std::function<double(double)>& f, double R);

/// Cubic Hermite interpolation of (r, z) inside cell [k, k+1] at s.
struct ProfilePoint {
    double r, z, rp, zp;
};
ProfilePoint interpolate(const ProfileGrid& grid, Eigen::Index cell, double s);

struct TotalCurvature {
    double value = 0;           // ∫_Σ |A|^{n-1} dV
    double tail = 0;            // part beyond |s| = s_max
    double error_estimate = 0;  // Richardson + tail quadrature
};

TotalCurvature total_curvature(const ProfileGrid& grid, double rel_tol = 1e-6);

struct DecayFit {
    double exponent_u = 0;
    double exponent_grad = 0;
    double limit_of_scaled_u = 0;  // r^{n-3} u at the outermost sample
    double z_infinity = 0;
    double fit_r_min = 0, fit_r_max = 0;
    bool trivial_end = false;
};

DecayFit end_asymptotics(const ProfileGrid& grid);

struct LevelSetChecks {
    double pinching_residual = 0;  // |1/r^2 - 1/R^2| on the level set |x| = R
    double volume_ratio = 0;       // Vol(Σ ∩ B_R) / (ω_{n-1} R^{n-1})
    double curvature_decay = 0;    // max |A| |x| over samples with |x| >= R
    double levelset_radius = 0;
    double s_at_R = 0;
};

LevelSetChecks levelset_and_volume_checks(const ProfileGrid& grid, double R);

}  // namespace morselab
