#include <cmath>

#include "dioph/approx.hpp"
#include "dioph/errors.hpp"
#include "doctest.h"

using namespace dioph;

namespace {

LinearSystem sqrt2_1x3() {
    auto basis = ConstantBasis::sqrt_basis({2});
    return LinearSystem::parse_rows(basis, {{"1", "-1*sqrt2", "-1+1*sqrt2"}});
}

LinearSystem example_2x4() {
    auto basis = ConstantBasis::sqrt_basis({2, 3});
    return LinearSystem::parse_rows(
        basis, {{"1", "0", "-1*sqrt2", "-1+1*sqrt2"}, {"0", "1", "-1*sqrt3", "-1+1*sqrt3"}});
}

} // namespace

TEST_CASE("approx_lower: full rational dimension returns tau1") {
    auto sys = LinearSystem::parse_rows(ConstantBasis::empty(), {{"1", "-2", "1"}});
    ApproxQuery q;
    q.tau1 = 0.3;
    CHECK(approx_lower(sys, q) == 0.3);
}

TEST_CASE("approx_lower: sqrt2 system certified bound at the worked parameters") {
    LinearSystem sys = sqrt2_1x3();
    ApproxQuery q;
    q.tau1 = 0.25;
    q.tau2 = 0.25;
    q.delta = 1e-4;
    double lower = approx_lower(sys, q);
    CHECK(lower >= 0.01);
    CHECK(lower <= 0.5); // sanity: distances to Z are at most 1/2
}

TEST_CASE("approx_lower: shrinking the region never decreases the bound") {
    LinearSystem sys = sqrt2_1x3();
    ApproxQuery wide, narrow;
    wide.tau1 = narrow.tau1 = 0.25;
    wide.delta = narrow.delta = 1e-3;
    wide.tau2 = 0.25;
    narrow.tau2 = 0.9; // smaller 1/tau2 ball
    CHECK(approx_lower(sys, narrow) >= approx_lower(sys, wide) - 1e-12);
}

TEST_CASE("approx_lower: monotone non-increasing as tau2 decreases") {
    LinearSystem sys = sqrt2_1x3();
    double prev = std::numeric_limits<double>::infinity();
    for (double tau2 : {0.9, 0.5, 0.25, 0.12}) {
        ApproxQuery q;
        q.tau1 = 0.25;
        q.tau2 = tau2;
        q.delta = 1e-3;
        double lower = approx_lower(sys, q);
        CHECK(lower <= prev + 2e-3); // grid-slack jitter allowance
        prev = lower;
    }
}

TEST_CASE("approx_upper: sqrt2 witness at tau2 = 0.1 is the convergent k = 5") {
    LinearSystem sys = sqrt2_1x3();
    ApproxQuery q;
    q.tau1 = 0.25;
    q.tau2 = 0.1;
    ApproxResult res = approx_upper(sys, q);
    REQUIRE(res.witness_k.size() == 1);
    CHECK(std::labs(res.witness_k[0]) == 5);
    CHECK(res.upper_bound == doctest::Approx(std::fabs(5.0 * std::sqrt(2.0) - 7.0)).epsilon(1e-9));
}

TEST_CASE("approx_upper: badly approximable certificate 1/(10 k)") {
    // Every scanned k has max coordinate distance at least |k sqrt2| mod 1,
    // which the badly-approximable bound keeps above 1/(10 k).
    const double r2 = std::sqrt(2.0);
    auto fd = [](double x) { return std::fabs(x - std::round(x)); };
    for (long k = 1; k <= 10; ++k) {
        double kd = static_cast<double>(k);
        double value = std::max({fd(kd), fd(r2 * kd), fd((r2 - 1.0) * kd)});
        CHECK(value >= 1.0 / (10.0 * kd));
    }
    LinearSystem sys = sqrt2_1x3();
    ApproxQuery q;
    q.tau2 = 0.1;
    ApproxResult res = approx_upper(sys, q);
    CHECK(res.upper_bound >= 1.0 / (10.0 * 10.0));
}

TEST_CASE("approx_upper: integer system reports the definition floor") {
    auto sys = LinearSystem::parse_rows(ConstantBasis::empty(), {{"1", "-2", "1"}});
    ApproxQuery q;
    q.tau1 = 0.3;
    ApproxResult res = approx_upper(sys, q);
    CHECK(res.definition_floor);
    CHECK(res.upper_bound == 0.3);
}

TEST_CASE("certification: lower <= upper on the test systems") {
    for (auto& sys : {sqrt2_1x3(), example_2x4()}) {
        ApproxQuery q;
        q.tau1 = 0.25;
        q.tau2 = 0.25;
        q.delta = sys.m() == 1 ? 1e-4 : 2e-3;
        ApproxResult res = approx_query(sys, q);
        CHECK(res.lower_bound <= res.upper_bound + 1e-12);
        CHECK(res.upper_bound > 0.0); // positivity for u <= m-1
    }
}

TEST_CASE("decay probe: sqrt2 system fits exponent ~ 1") {
    LinearSystem sys = sqrt2_1x3();
    std::vector<double> grid;
    for (double t = 1e-3; t <= 0.1 + 1e-12; t *= std::sqrt(10.0)) grid.push_back(t);
    DecayProbe probe = algebraic_decay_probe(sys, 0.25, grid);
    CHECK(probe.fitted_exponent == doctest::Approx(1.0).epsilon(0.3));
    for (const auto& row : probe.table) CHECK(row.lower <= row.upper + 1e-12);
}

TEST_CASE("decay probe: full rational dimension is flat") {
    auto sys = LinearSystem::parse_rows(ConstantBasis::empty(), {{"1", "-2", "1"}});
    DecayProbe probe = algebraic_decay_probe(sys, 0.3, {0.5, 0.25, 0.1});
    CHECK(std::fabs(probe.fitted_exponent) < 1e-9);
}

TEST_CASE("decay probe: the 2x4 example has a finite fitted exponent") {
    LinearSystem sys = example_2x4();
    DecayProbe probe = algebraic_decay_probe(sys, 0.25, {0.5, 0.3, 0.2});
    CHECK(std::isfinite(probe.fitted_exponent));
    int positive = 0;
    for (const auto& row : probe.table)
        if (row.lower > 0.0) ++positive;
    CHECK(positive >= 2);
}

TEST_CASE("approx_lower: certified bound non-decreasing as the grid refines") {
    LinearSystem sys = sqrt2_1x3();
    double prev = -1.0;
    for (double delta : {1e-2, 1e-3, 1e-4}) {
        ApproxQuery q;
        q.tau1 = 0.25;
        q.tau2 = 0.25;
        q.delta = delta;
        double lower = approx_lower(sys, q);
        CHECK(lower >= prev - 1e-9);
        prev = lower;
    }
}
