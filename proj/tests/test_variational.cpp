#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "morselab/errors.hpp"
#include "morselab/variational.hpp"

#include <cmath>

using namespace morselab;

TEST_CASE("f_ij vanishes for i < j < n and f_in is proportional to <e_i, ν>") {
    for (int n = 4; n <= 7; ++n) {
        const ProfileGrid g = solve_profile(n, 1.0, 20.0, 2000);
        const ClosedFormReduction dz = closed_form_reduction(g, coordinate_form(g));
        CHECK(dz.c == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(dz.sup_in <= 1e-10);
        CHECK(dz.sup_ij <= 1e-12);
        const HarmonicData lim = limit_harmonic(g);
        const ClosedFormReduction w = closed_form_reduction(g, lim);
        CHECK(w.c == doctest::Approx(1.0 / lim.inverse_weight_integral).epsilon(1e-12));
        CHECK(w.sup_in <= 1e-10);
    }
}

TEST_CASE("test functions are antisymmetric and reject i == j") {
    const ProfileGrid g = solve_profile(4, 1.0, 10.0, 200);
    const HarmonicData w = limit_harmonic(g);
    const FactorField a = test_function_field(g, w, 1, 4), b = test_function_field(g, w, 4, 1);
    CHECK(a.plus(b).is_zero());
    CHECK_THROWS_AS(test_function(g, w, 2, 2), DomainError);
}

TEST_CASE("Q-sum vanishes at second order on the catenoid") {
    std::vector<double> sums;
    for (Eigen::Index N : {20000, 40000, 80000}) {
        const ProfileGrid g = solve_profile(4, 1.0, 40.0, N);
        const QSum q = q_sum(g, limit_harmonic(g));
        CHECK(q.pairs.size() == 6);
        sums.push_back(q.sum);
    }
    CHECK(std::abs(sums.back()) <= 1e-6);
    CHECK(std::log2(std::abs(sums[1] / sums[2])) >= 1.8);
}

TEST_CASE("seeded sample points are reproducible and stay in the interior") {
    const ProfileGrid g = solve_profile(4, 1.0, 10.0, 200);
    const auto a = sample_points(g, 50, 7), b = sample_points(g, 50, 7), c = sample_points(g, 50, 8);
    REQUIRE(a.size() == 50);
    bool differs = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].s == b[k].s);
        CHECK(a[k].theta == b[k].theta);
        CHECK(a[k].theta.norm() == doctest::Approx(1.0));
        CHECK(std::abs(a[k].theta.dot(a[k].E)) < 1e-12);
        CHECK(a[k].a * a[k].a + a[k].E.squaredNorm() == doctest::Approx(1.0));
        CHECK(std::abs(a[k].s) <= g.s_max - 3 * g.h + 1e-12);
        differs = differs || a[k].s != c[k].s;
    }
    CHECK(differs);
}

TEST_CASE("pointwise identities converge at second order; the flipped pairing sign does not") {
    for (int n : {4, 5}) {
        const auto samples = sample_points(solve_profile(n, 1.0, 10.0, 200), 100, 42);
        std::vector<std::vector<IdentityResidual>> runs;
        double printed = 0;
        for (Eigen::Index N : {200, 400, 800}) {
            const ProfileGrid g = solve_profile(n, 1.0, 10.0, N);
            const HarmonicData w = limit_harmonic(g);
            runs.push_back(lemma_identities_check(g, w, samples));
            for (const auto& r : lemma_identities_check(g, w, samples, PairingSign::as_printed))
                if (r.id == "pairing_laplacian") printed = r.sup_residual;
        }
        REQUIRE(runs.back().size() == 6);
        for (std::size_t k = 0; k < runs.back().size(); ++k) {
            const double order = std::log2(runs[1][k].sup_residual / runs[2][k].sup_residual);
            CHECK_MESSAGE(order >= 1.8, runs[2][k].id);
            CHECK(runs[2][k].sup_residual <= 100.0 * runs[2][k].h * runs[2][k].h);
        }
        CHECK(printed > 1.0);
    }
}

TEST_CASE("projection rank meets the required bound and detects duplicate forms") {
    const ProfileGrid g = solve_profile(4, 1.0, 20.0, 2000);
    const HarmonicData w = limit_harmonic(g);
    const RankReport r = projection_rank(g, {w});
    CHECK(r.required == 1);
    CHECK(r.max_rank >= r.required);
    CHECK(r.bound_ok);
    CHECK(r.injective);
    const RankReport d = projection_rank(g, {w, w});
    CHECK(d.family_rank == 1);
    CHECK_FALSE(d.injective);
}

TEST_CASE("f_{ω,in} is a Jacobi field on the catenoid") {
    const auto run = [](Eigen::Index N) {
        const ProfileGrid g = solve_profile(4, 1.0, 20.0, N);
        return test_function(g, limit_harmonic(g), 1, 4);
    };
    const TestFunctionField a = run(2000), b = run(4000);
    CHECK(b.finite);
    CHECK(std::log2(a.jacobi_residual / b.jacobi_residual) >= 1.8);
    CHECK(std::abs(b.q_value) < 1e-5);
}
