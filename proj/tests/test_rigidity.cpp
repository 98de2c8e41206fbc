#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "morselab/errors.hpp"
#include "morselab/rigidity.hpp"

#include <algorithm>
#include <random>

using namespace morselab;

namespace {

// The constraints are unit vectors on distinct off-diagonal slots plus the
// trace, which touches only diagonal slots, so they are independent.
int counted_dimension(const Eigen::VectorXd& k) {
    const int d = static_cast<int>(k.size());
    int unequal = 0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (std::abs(k(i) - k(j)) > 1e-6 * k.cwiseAbs().maxCoeff()) ++unequal;
    return 1 + d + d * (d + 1) / 2 - unequal - 1;
}

Eigen::VectorXd tuple(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

}  // namespace

TEST_CASE("constraint dimension on the reference tuples") {
    CHECK(constraint_rank(tuple({1, 2, -3})) == 6);
    CHECK(constraint_rank(tuple({1, 1, -2})) == 7);
    CHECK(constraint_rank(tuple({0, 0, 0})) == 9);
    for (int n = 3; n <= 7; ++n) {
        Eigen::VectorXd k = Eigen::VectorXd::LinSpaced(n - 1, 1.0, n - 1.0);
        k.array() -= k.mean();
        CHECK(constraint_rank(k) == 2 * n - 2);
        CHECK(constraint_count(k).form_dimension == 2 * n - 3);
    }
}

TEST_CASE("constraint dimension matches the direct count on random patterns") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> values(-3, 3);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 2 + trial % 5;
        Eigen::VectorXd k(d);
        for (int i = 0; i < d; ++i) k(i) = values(rng);
        CHECK(constraint_rank(k) == counted_dimension(k));
    }
}

TEST_CASE("constraint dimension is invariant under permutation and scaling") {
    Eigen::VectorXd k = tuple({2, 2, -1, -3, 0});
    const int base = constraint_rank(k);
    std::vector<int> p{0, 1, 2, 3, 4};
    std::mt19937 rng(1);
    for (int t = 0; t < 20; ++t) {
        std::shuffle(p.begin(), p.end(), rng);
        Eigen::VectorXd q(5);
        for (int i = 0; i < 5; ++i) q(i) = k(p[i]);
        CHECK(constraint_rank(q) == base);
        CHECK(constraint_rank(q * 3.7) == base);
    }
}

TEST_CASE("classification of tuples") {
    CHECK(classify(tuple({1, 2, -3})) == CurvatureTag::all_distinct);
    CHECK(classify(tuple({1, 1, -2})) == CurvatureTag::multiplicity_n2);
    CHECK(classify(tuple({0, 0, 0})) == CurvatureTag::umbilic_zero);
    CHECK(classify(tuple({1, 1, -1, -1})) == CurvatureTag::other);
    CHECK_THROWS_AS(classify(tuple({1, 1, 1})), InputError);
}

TEST_CASE("catenoid samples never show distinct curvatures") {
    for (int n = 4; n <= 7; ++n) {
        const ProfileGrid g = solve_profile(n, 1.0, 30.0, 3000);
        const MultiplicityScan s = multiplicity_scan(curvature_samples(g));
        CHECK(s.multiplicity_n2 == g.size());
        CHECK_FALSE(s.has_distinct_point);
        CHECK(s.branch == RigidityBranch::catenoid);
    }
    const MultiplicityScan p = multiplicity_scan(curvature_samples(make_plane(4, 10.0, 100)));
    CHECK(p.branch == RigidityBranch::hyperplane);
    CHECK(multiplicity_scan({tuple({1, 2, -3})}).branch == RigidityBranch::distinct_point);
}

TEST_CASE("frame relation on the catenoid") {
    const ProfileGrid g = solve_profile(4, 1.0, 10.0, 2000);
    const FrameResiduals f = frame_equation_check(g);
    CHECK_FALSE(f.skipped);
    CHECK(f.connection_residual <= 1e-8);
    CHECK(f.b == 0.0);
    CHECK(f.d == 0.0);
    CHECK(frame_equation_check(make_plane(4, 10.0, 100)).skipped);
}

TEST_CASE("bound reports use exact fractions") {
    const BoundReport c = bound_report(4, 2, 0, 1, 3, RigidityBranch::catenoid);
    CHECK(c.rhs_thm11.str() == "1/6");
    CHECK(c.rhs_thm13.str() == "-2/3");
    CHECK(c.thm11_ok);
    CHECK(c.thm13_ok);
    CHECK(c.branch_ok);

    const BoundReport p = bound_report(4, 1, 0, 0, 0, RigidityBranch::hyperplane);
    CHECK(p.rhs_thm11.str() == "0");
    CHECK(p.thm11_ok);
    CHECK(p.thm13_ok);
    CHECK(p.branch_ok);

    const BoundReport v = bound_report(4, 20, 0, 1, 0);
    CHECK(v.rhs_thm11.str() == "19/6");
    CHECK_FALSE(v.thm11_ok);
    CHECK(bound_report(4, 20, 0, 1, 0).thm11_ok == v.thm11_ok);

    // Distinct-point branch: l - 6 index <= 5 for n = 4.
    CHECK(bound_report(4, 12, 0, 1, 0, RigidityBranch::distinct_point).branch_ok);
    CHECK_FALSE(bound_report(4, 13, 0, 1, 0, RigidityBranch::distinct_point).branch_ok);
    CHECK_THROWS_AS(bound_report(4, 0, 0, 0, 0), DomainError);
    CHECK_THROWS_AS(bound_report(4, 1, -1, 0, 0), DomainError);
}

TEST_CASE("bound flags agree with floating-point evaluation away from ties") {
    for (int n = 3; n <= 7; ++n)
        for (int ends = 1; ends <= 30; ++ends)
            for (long index = 0; index <= 3; ++index) {
                const BoundReport b = bound_report(n, ends, 0, index, 0);
                const double rhs = 2.0 * (ends - 1) / (n * (n - 1.0));
                if (std::abs(index - rhs) > 1e-9) CHECK(b.thm11_ok == (index > rhs));
            }
}

TEST_CASE("rational arithmetic") {
    CHECK((Rational(1, 3) + Rational(1, 6)).str() == "1/2");
    CHECK((Rational(2, -4)).str() == "-1/2");
    CHECK((Rational(3) * Rational(1, 3)).str() == "1");
    CHECK(Rational(1, 3) < Rational(1, 2));
}
