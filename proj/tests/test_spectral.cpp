#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "morselab/errors.hpp"
#include "morselab/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace morselab;

namespace {

// Dimension of degree-l harmonic polynomials in d variables: the rank of
// Δ : P_l → P_{l-2} is full, so dim = dim P_l - dim P_{l-2}.
int homogeneous_dim(int d, int l) {
    if (l < 0) return 0;
    long num = 1, den = 1;  // C(l + d - 1, d - 1)
    for (int i = 1; i < d; ++i) {
        num *= l + i;
        den *= i;
    }
    return static_cast<int>(num / den);
}

// Generalized eigenvalues of the tridiagonal pencil by a dense symmetric solve.
Eigen::VectorXd dense_eigenvalues(const ModeOperator& op) {
    const Eigen::Index m = op.size();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        K(i, i) = op.diag(i);
        if (i + 1 < m) K(i, i + 1) = K(i + 1, i) = op.off(i);
    }
    const Eigen::VectorXd isq = op.mass.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd A = isq.asDiagonal() * K * isq.asDiagonal();
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST_CASE("harmonic multiplicities match the polynomial count") {
    for (int n = 3; n <= 7; ++n)
        for (int l = 0; l <= 8; ++l)
            CHECK(harmonic_multiplicity(n, l) == homogeneous_dim(n - 1, l) - homogeneous_dim(n - 1, l - 2));
}

TEST_CASE("inertia counts agree with a dense eigensolve") {
    const ProfileGrid g = solve_profile(4, 1.0, 10.0, 200);
    for (int l = 0; l <= 3; ++l) {
        const ModeOperator op = build_mode_operator(g, l, 8.0);
        const Eigen::VectorXd ev = dense_eigenvalues(op);
        for (double sigma : {-1.0, -0.1, 0.0, 0.05, 0.5}) {
            const long expected = (ev.array() < sigma).count();
            CHECK(count_below(op, sigma) == expected);
        }
        CHECK(negative_count(op) == (ev.array() < -op.spectral_floor()).count());
    }
}

TEST_CASE("lowest eigenpairs agree with the dense spectrum and are M-normalized") {
    const ProfileGrid g = solve_profile(5, 1.0, 10.0, 400);
    const ModeOperator op = build_mode_operator(g, 0, 10.0);
    const Eigen::VectorXd ev = dense_eigenvalues(op);
    const EigenPairs p = lowest_eigenpairs(g, op, 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(p.values(k) == doctest::Approx(ev(k)).epsilon(1e-8));
        const Eigen::VectorXd v = p.vectors.col(k);
        CHECK(v.dot(op.mass.cwiseProduct(v)) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(op.energy(v) == doctest::Approx(p.values(k)).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("large problems use the iterative path and still match the counts") {
    const ProfileGrid g = solve_profile(4, 1.0, 20.0, 20000);
    const ModeOperator op = build_mode_operator(g, 0, 20.0);
    const EigenPairs p = lowest_eigenpairs(g, op, 2);
    CHECK(count_below(op, p.values(0) - 1e-6) == 0);
    CHECK(count_below(op, p.values(0) + 1e-6) == 1);
    CHECK(count_below(op, p.values(1) + 1e-6) == 2);
}

TEST_CASE("plane l = 0 ground state approaches π²/S² for n = 4") {
    const double S = 10.0;
    const ProfileGrid g = make_plane(4, S, 4000);
    const ModeOperator op = build_mode_operator(g, 0, S);
    const EigenPairs p = lowest_eigenpairs(g, op, 1);
    CHECK(p.values(0) == doctest::Approx(M_PI * M_PI / (S * S)).epsilon(1e-5));
}

TEST_CASE("catenoid index is one and the plane is stable") {
    for (int n = 4; n <= 7; ++n) {
        const ProfileGrid g = solve_profile(n, 1.0, 40.0, 40000);
        IndexOptions o;
        o.certify_nullity = false;
        o.eigenvalues_per_mode = 0;
        const SpectralReport r = morse_index(g, {10.0, 20.0, 40.0}, o);
        CHECK(r.morse_index == 1);
        CHECK(r.stable);
    }
    const SpectralReport p = morse_index(make_plane(4, 40.0, 4000), {10.0, 20.0, 40.0});
    CHECK(p.morse_index == 0);
    CHECK(p.nullity_lower_bound == 0);
}

TEST_CASE("index is invariant under scaling the neck") {
    IndexOptions o;
    o.certify_nullity = false;
    o.eigenvalues_per_mode = 0;
    const SpectralReport a = morse_index(solve_profile(4, 1.0, 20.0, 10000), {5.0, 10.0, 20.0}, o);
    const SpectralReport b = morse_index(solve_profile(4, 2.0, 40.0, 10000), {10.0, 20.0, 40.0}, o);
    CHECK(a.morse_index == b.morse_index);
}

TEST_CASE("mode cap raises an inconclusive error carrying the partial report") {
    IndexOptions o;
    o.l_max_cap = 0;
    o.certify_nullity = false;
    try {
        morse_index(solve_profile(4, 1.0, 10.0, 1000), {10.0}, o);
        FAIL("expected InconclusiveError");
    } catch (const InconclusiveError& e) {
        CHECK(e.partial().sweep.size() == 1);
    }
}

TEST_CASE("truncation sweep must increase") {
    const ProfileGrid g = solve_profile(4, 1.0, 10.0, 100);
    CHECK_THROWS_AS(morse_index(g, {5.0, 5.0}), DomainError);
    CHECK_THROWS_AS(morse_index(g, {}), DomainError);
}

TEST_CASE("translations are certified L² Jacobi fields; axial and dilation are not") {
    const auto c = nullity_candidates(4, 1.0, SurfaceKind::catenoid);
    int translations = 0;
    for (const auto& f : c) {
        if (f.label.rfind("translation e_", 0) == 0) {
            CHECK(f.certificate.certified());
            CHECK(f.certificate.observed_order >= 1.8);
            ++translations;
        } else {
            CHECK_FALSE(f.certificate.is_L2);
        }
    }
    CHECK(translations == 3);
    CHECK(nullity_lower_bound(c) == 3);
}

TEST_CASE("stability on the complement needs eigenfunctions when the index is positive") {
    const ProfileGrid g = solve_profile(4, 1.0, 10.0, 200);
    FactorField f;
    f.add({}, Eigen::VectorXd::Ones(g.size()));
    CHECK_THROWS_AS(stability_on_complement(g, f, {}, 1), PreconditionError);
}
