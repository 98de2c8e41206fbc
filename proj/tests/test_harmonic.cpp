#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "morselab/errors.hpp"
#include "morselab/harmonic.hpp"

#include <cmath>

using namespace morselab;

// n = 3: r = sqrt(r0² + s²), so ∫ r⁻¹ ds = asinh(s / r0) in closed form.
TEST_CASE("n = 3 truncated solution matches the asinh closed form") {
    const double r0 = 1.0, S = 4.0;
    const ProfileGrid g = solve_profile(3, r0, 5.0, 2000);
    const HarmonicData d = truncated_harmonic(g, S);
    const double A = std::asinh(S / r0);
    double err = 0;
    for (Eigen::Index k = 0; k < g.size(); ++k) {
        const double s = std::clamp(g.s(k), -S, S);
        err = std::max(err, std::abs(d.phi(k) - (std::asinh(s / r0) + A) / (2 * A)));
    }
    CHECK(err < 1e-8);
    CHECK(d.dirichlet_energy == doctest::Approx(2 * M_PI / (2 * A)).epsilon(1e-8));
    CHECK(d.energy_quadrature == doctest::Approx(d.dirichlet_energy).epsilon(1e-6));
}

TEST_CASE("maximum principle, complement and monotone energies") {
    const ProfileGrid g = solve_profile(4, 1.0, 80.0, 40000);
    double prev = INFINITY;
    for (double S : {20.0, 40.0, 80.0}) {
        const HarmonicData a = truncated_harmonic(g, S), b = truncated_harmonic(g, S, {1.0, 0.0});
        for (Eigen::Index k = 0; k < g.size(); ++k) {
            if (std::abs(g.s(k)) < S) {
                CHECK(a.phi(k) > 0.0);
                CHECK(a.phi(k) < 1.0);
            }
            CHECK(std::abs(a.phi(k) + b.phi(k) - 1.0) <= 1e-12);
        }
        CHECK(a.dirichlet_energy < prev);
        prev = a.dirichlet_energy;
    }
    const HarmonicData lim = limit_harmonic(g);
    CHECK(lim.dirichlet_energy < prev);
    CHECK(lim.phi(g.neck()) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("limit is the affine function of the height") {
    for (int n : {4, 5, 6}) {
        const ProfileGrid g = solve_profile(n, 1.0, 40.0, 20000);
        const HarmonicData lim = limit_harmonic(g);
        const double m = n - 2;
        const double zinf = std::beta(0.5 - 0.5 / m, 0.5) / (2.0 * m);
        double err = 0;
        for (Eigen::Index k = 0; k < g.size(); ++k)
            err = std::max(err, std::abs(lim.phi(k) - 0.5 * (g.z(k) / zinf + 1.0)));
        CHECK(err < 1e-8);
    }
}

TEST_CASE("discrete harmonicity converges at second order") {
    const auto res = [](Eigen::Index N) {
        const ProfileGrid g = solve_profile(4, 1.0, 10.0, N);
        return harmonicity_residual(g, truncated_harmonic(g, 8.0));
    };
    const double a = res(400), b = res(800);
    CHECK(std::log2(a / b) > 1.8);
}

TEST_CASE("n = 3 limit diverges") {
    CHECK_THROWS_AS(limit_harmonic(solve_profile(3, 1.0, 5.0, 100)), DivergenceError);
}

TEST_CASE("form basis: one form on the catenoid, none on the plane") {
    const FormBasis c = harmonic_one_form_basis(solve_profile(4, 1.0, 20.0, 2000));
    CHECK(c.function_count == 2);
    CHECK(c.dimension == 1);
    CHECK(c.forms.size() == 1);
    const FormBasis p = harmonic_one_form_basis(make_plane(4, 20.0, 200));
    CHECK(p.function_count == 1);
    CHECK(p.dimension == 0);
    CHECK(p.forms.empty());
}

TEST_CASE("energy scales like r0^(n-3)") {
    const HarmonicData a = limit_harmonic(solve_profile(5, 1.0, 40.0, 10000));
    const HarmonicData b = limit_harmonic(solve_profile(5, 2.0, 80.0, 10000));
    CHECK(b.dirichlet_energy / a.dirichlet_energy == doctest::Approx(4.0).epsilon(1e-6));
}
