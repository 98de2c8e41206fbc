#pragma once

// Pointwise principal-curvature structure of minimal hypersurfaces, the
// second-order count of harmonic functions whose Hessian commutes with the
// shape operator, and the index/topology inequality checks.

#include "morselab/geometry.hpp"
#include "morselab/rational.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace morselab {

enum class CurvatureTag { all_distinct, multiplicity_n2, umbilic_zero, other };

std::string to_string(CurvatureTag tag);

/// Tag for one tuple of n-1 principal curvatures. κ_i and κ_j count as equal
/// when |κ_i - κ_j| <= tol · max|κ|. Throws InputError when Σκ exceeds the same
/// tolerance.
CurvatureTag classify(const Eigen::VectorXd& kappas, double tol = 1e-6);

enum class RigidityBranch { hyperplane, catenoid, distinct_point, unclassified };

std::string to_string(RigidityBranch branch);

struct MultiplicityScan {
    std::vector<CurvatureTag> tags;
    long all_distinct = 0, multiplicity_n2 = 0, umbilic_zero = 0, other = 0;
    bool has_distinct_point = false;
    bool multiplicity_everywhere = false;  // multiplicity n-2 (or umbilic) at every sample
    RigidityBranch branch = RigidityBranch::unclassified;
};

MultiplicityScan multiplicity_scan(const std::vector<Eigen::VectorXd>& samples, double tol = 1e-6);

/// Curvature tuples at every sample of a grid.
std::vector<Eigen::VectorXd> curvature_samples(const ProfileGrid& grid);

struct ConstraintCount {
    int unknowns = 0;     // 1 + d + d(d+1)/2 second-order data at a point
    int constraints = 0;  // rank of the linear constraints
    int dimension = 0;    // free second-order data for functions
    int form_dimension = 0;  // dimension - 1: constants have zero differential
};

/// Second-order data (φ, ∇φ, Hess φ) at a point with Hess(e_i, e_j) = 0 for
/// κ_i ≠ κ_j and tr Hess = 0, solved by exact rational elimination.
ConstraintCount constraint_count(const Eigen::VectorXd& kappas, double tol = 1e-6);

/// Solution-space dimension of constraint_count.
int constraint_rank(const Eigen::VectorXd& kappas, double tol = 1e-6);

struct FrameResiduals {
    bool skipped = false;            // umbilic surface: λ vanishes
    double connection_residual = 0;  // sup |r'/r + λ'/((n-1)λ)|
    double b = 0, d = 0;             // mixed frame coefficients (zero by symmetry)
    double lambda_variation = 0;     // along level spheres
    double alpha_variation = 0;
    Eigen::Index samples = 0;
};

/// With λ = κ_m and e_{n-1} the profile direction, compares <∇_{e_1} e_{n-1}, e_1>
/// = r'/r with -e_{n-1}(λ)/((n-1)λ); the derivative is a five-point difference.
FrameResiduals frame_equation_check(const ProfileGrid& grid);

struct BoundReport {
    int n = 0;
    int ends = 0;
    int b1 = 0;
    long index = 0;
    long nullity_lb = 0;
    Rational rhs_thm11;
    Rational rhs_thm13;
    bool thm11_ok = false;  // index + nullity >= rhs_thm11
    bool thm13_ok = false;  // index >= rhs_thm13
    RigidityBranch branch = RigidityBranch::unclassified;
    int l = 0;                 // ends + b1 - 1
    int form_bound = 0;        // 2n - 3
    Rational branch_lhs;       // l - n(n-1)/2 · index
    bool branch_ok = false;    // the inequality the branch asserts
};

/// Right-hand sides and flags from exact arithmetic. Branch checks:
/// hyperplane l = 0 and index 0, catenoid l = 1 and index 1, distinct point
/// l - n(n-1)/2 · index <= 2n - 3. ends < 1 or b1 < 0 is a DomainError.
BoundReport bound_report(int n, int ends, int b1, long index, long nullity_lb,
                         RigidityBranch branch = RigidityBranch::unclassified);

struct SpectralReport;
BoundReport bound_report(int n, int ends, int b1, const SpectralReport& spectral,
                         RigidityBranch branch = RigidityBranch::unclassified);

}  // namespace morselab
