#include <cmath>
#include <vector>

#include "doctest.h"
#include "rblab/errors.hpp"
#include "rblab/feasibility.hpp"

using namespace rblab::feasibility;

namespace {
std::vector<double> grid(double lo, double hi, double step) {
    std::vector<double> g;
    for (double a = lo; a <= hi + 1e-12; a += step) g.push_back(a);
    return g;
}
}  // namespace

TEST_CASE("reference acceptance points") {
    SUBCASE("(n=100, alpha=3, k=3, p=0.5) passes all five") {
        const FeasibilityReport rep = check(100, 3.0, 3, 0.5);
        REQUIRE(rep.conditions.size() == 5);
        for (const ConditionResult& c : rep.conditions) CHECK(c.pass);
        CHECK(rep.overall);
        CHECK(rep.epsilon == doctest::Approx(7.2384e-4).epsilon(1e-3));
    }
    SUBCASE("(n=100, alpha=2, k=3, p=0.5) fails exactly condition 5") {
        const FeasibilityReport rep = check(100, 2.0, 3, 0.5);
        CHECK_FALSE(rep.overall);
        for (const ConditionResult& c : rep.conditions) {
            if (c.id == 5) {
                CHECK_FALSE(c.pass);
                CHECK(c.value == doctest::Approx(0.21).epsilon(0.05));
            } else {
                CHECK(c.pass);
            }
        }
    }
    SUBCASE("k=1 at p=0.5 fails condition 1 on k >= 1/(1-p)") {
        const FeasibilityReport rep = check(100, 3.0, 1, 0.5);
        CHECK_FALSE(rep.overall);
        const ConditionResult& c1 = rep.conditions[0];
        CHECK_FALSE(c1.pass);
        REQUIRE(c1.parts.size() == 3);
        CHECK_FALSE(c1.parts[2].pass);  // k - 1/(1-p) = -1
        CHECK(c1.parts[2].value == doctest::Approx(-1.0));
    }
}

TEST_CASE("slack signs agree with verdicts and reproduce exactly") {
    const FeasibilityReport a = check(100, 3.0, 3, 0.5);
    const FeasibilityReport b = check(100, 3.0, 3, 0.5);
    for (std::size_t i = 0; i < a.conditions.size(); ++i) {
        CHECK(a.conditions[i].slack == b.conditions[i].slack);  // bitwise reproducible
        if (a.conditions[i].pass)
            CHECK(a.conditions[i].slack > 0.0);
        else
            CHECK(a.conditions[i].slack <= 0.0);
    }
}

TEST_CASE("domain error only for p") {
    CHECK_THROWS_AS(check(100, 3.0, 3, 0.0), rblab::DomainError);
    CHECK_THROWS_AS(check(100, 3.0, 3, 1.0), rblab::DomainError);
    // pathological n / alpha / k produce verdicts, not errors
    CHECK_FALSE(check(1, 3.0, 3, 0.5).overall);
    CHECK_FALSE(check(100, -1.0, 3, 0.5).overall);
    CHECK_FALSE(check(100, 3.0, 0, 0.5).overall);
}

TEST_CASE("find_feasible scans the grid in order") {
    SUBCASE("k=3, p=0.5 lands in (2.5, 3.25]") {
        const auto alpha = find_feasible(100, 3, 0.5, grid(1.0, 5.0, 0.25));
        REQUIRE(alpha.has_value());
        CHECK(*alpha > 2.5);
        CHECK(*alpha <= 3.25);
        CHECK(*alpha == doctest::Approx(2.75));
    }
    SUBCASE("grid below 1 yields nothing (condition 3 needs alpha > 1)") {
        CHECK_FALSE(find_feasible(100, 3, 0.5, grid(0.1, 0.95, 0.05)).has_value());
    }
    SUBCASE("non-ascending grid rejected") {
        CHECK_THROWS_AS(find_feasible(100, 3, 0.5, {2.0, 1.0}), rblab::DomainError);
    }
}

TEST_CASE("upward closure on the grid when r_cr p k > 1") {
    // r_cr(0.5) * 0.5 * 3 = 2.164 > 1
    bool seen_pass = false;
    for (double alpha : grid(1.0, 6.0, 0.25)) {
        const bool pass = check(100, alpha, 3, 0.5).overall;
        if (seen_pass) CHECK(pass);  // once passing, stays passing
        seen_pass = seen_pass || pass;
    }
    CHECK(seen_pass);
}
