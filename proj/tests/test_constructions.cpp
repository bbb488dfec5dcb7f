#include <cmath>
#include <set>

#include "dioph/constructions.hpp"
#include "dioph/errors.hpp"
#include "doctest.h"

using namespace dioph;

namespace {

// Same-sign b1, b2 instance: columns {0,1} are nearly dependent (the support
// pair is {2,3}) and the column orientation leaves solutions in [N]^4.
LinearSystem same_sign_system() {
    std::vector<BasisConstant> cs;
    BasisConstant s2{"sqrt2", BasisConstant::Kind::Sqrt, 2, ""};
    BasisConstant s5{"sqrt5", BasisConstant::Kind::Sqrt, 5, ""};
    BasisConstant pi_c{"pi", BasisConstant::Kind::Pi, 0, ""};
    BasisConstant e_c{"e", BasisConstant::Kind::E, 0, ""};
    auto basis = ConstantBasis::make({s2, s5, pi_c, e_c});
    return LinearSystem::parse_rows(
        basis, {{"1", "-1", "-1*pi", "-1*pi+1*sqrt2"}, {"2", "-21/10", "-1*sqrt5", "1*e"}});
}

} // namespace

TEST_CASE("detect_direction: near-degenerate family at square N") {
    LinearSystem sys = near_degenerate_family(10000);
    DegeneracyDirection dir = detect_direction(sys, 0.05);
    // eta on the N^{-1/2} = 1/100 scale.
    CHECK(dir.eta <= 10.0 * 0.01);
    CHECK(dir.eta >= 0.01 / 10.0);
    // Residual columns are the perturbed first two.
    std::set<std::size_t> resid(dir.column_order.begin() + 2, dir.column_order.end());
    CHECK(resid == std::set<std::size_t>{0, 1});
    // Normalization: max-abs entry of a equals 1.
    double max_abs = 0.0;
    for (double v : dir.a) max_abs = std::max(max_abs, std::fabs(v));
    CHECK(max_abs == doctest::Approx(1.0).epsilon(1e-12));
    // Opposite-sign support coefficients: the case-3 configuration.
    CHECK(dir.b1 * dir.b2 < 0.0);
}

TEST_CASE("detect_direction: exactly degenerate pair gives eta ~ 0") {
    auto basis = ConstantBasis::sqrt_basis({2});
    LinearSystem sys = LinearSystem::parse_rows(
        basis, {{"1", "1", "1", "1*sqrt2"}, {"1", "1", "1*sqrt2", "1"}});
    DegeneracyDirection dir = detect_direction(sys, 1e-6);
    CHECK(dir.eta <= 1e-10);
    CHECK(dir.pair_sigma_min <= 1e-12);
}

TEST_CASE("detect_direction: NoNearDegeneracy above the threshold") {
    auto basis = ConstantBasis::sqrt_basis({2, 3});
    LinearSystem sys = LinearSystem::parse_rows(
        basis, {{"1", "0", "-1*sqrt2", "-1+1*sqrt2"}, {"0", "1", "-1*sqrt3", "-1+1*sqrt3"}});
    CHECK_THROWS_AS(detect_direction(sys, 1e-3), NoNearDegeneracy);
}

TEST_CASE("solution spot-check: |b1 n1 + b2 n2| bounded on enumerated solutions") {
    const long n = 400; // perfect square keeps the family rational
    LinearSystem sys = near_degenerate_family(n);
    DegeneracyDirection dir = detect_direction(sys, 0.2);
    double a_l1 = 0.0;
    for (double v : dir.a) a_l1 += std::fabs(v);
    const double eps = 0.5;
    double bound = 10.0 * (dir.eta * static_cast<double>(n) + eps * a_l1);

    const auto& iv = sys.entry_intervals();
    CutoffSpec cutoff;
    cutoff.image = ImageCutoff::box(2, eps);
    std::size_t checked = 0;
    for_each_solution(sys, n, cutoff, [&](std::span<const long> pt) {
        double v = dir.b1 * static_cast<double>(pt[dir.support_col(0)]) +
                   dir.b2 * static_cast<double>(pt[dir.support_col(1)]);
        CHECK(std::fabs(v) <= bound);
        ++checked;
    });
    CHECK(checked > 0);
    (void)iv;
}

TEST_CASE("build_case2: degenerate eta gives the constant-one function") {
    WeightFunction f = build_case2(64, 0.0, 2.0);
    for (double v : f.values) CHECK(v == 1.0);
    CHECK(gowers_interval(WeightFunction::zeros(64), 2).norm_value == 0.0);
}

TEST_CASE("build_case2: pinned norm bound at N=1024, C1 eta = 1/16, s=1") {
    const long n = 1024;
    WeightFunction f1 = build_case2(n, 1.0 / 16.0, 1.0);
    std::vector<double> centered(n);
    for (long i = 0; i < n; ++i) centered[i] = f1.values[i] - 1.0;
    double norm = gowers_interval(WeightFunction::from_values(centered), 2).norm_value;
    CHECK(norm <= kCase2NormConstant * std::pow(1.0 / 16.0, 0.75));
    CHECK(norm > 0.0);
}

TEST_CASE("build_case2: cut past N raises DegenerateInterval") {
    CHECK_THROWS_AS(build_case2(100, 1.0, 2.0), DegenerateInterval);
}

TEST_CASE("converse_verdict case 2: same-sign instance zeroes the count") {
    LinearSystem sys = same_sign_system();
    ConverseParams params;
    params.detect_threshold = 0.1;
    ConverseReport rep = converse_verdict(sys, 1000, params);
    CHECK(rep.case_id == 2);
    CHECK(rep.t_ones > 0.0);
    CHECK(rep.t_gap == doctest::Approx(rep.t_ones)); // T(f1,1,..) = 0
    CHECK(rep.gap_ok);
    CHECK(rep.norm_ok);
    CHECK(rep.rho < 0.5);
}

TEST_CASE("case 3 machinery: sampling invariants at N=900") {
    LinearSystem sys = near_degenerate_family(900);
    DegeneracyDirection dir = detect_direction(sys, 0.2);
    Case3Setup setup = prepare_case3(sys, 900, dir, 0.5);
    CHECK(setup.n_blocks >= 2);
    CHECK(setup.t_ones_raw > 0.0);
    CHECK(setup.captured_raw > 0.0);
    CHECK(setup.gamma >= 1.0);

    // Determinism: identical seed gives identical sets.
    BlockConstruction s1 = sample_case3(setup, 0.2, 42);
    BlockConstruction s2 = sample_case3(setup, 0.2, 42);
    CHECK(s1.a_set == s2.a_set);
    CHECK(s1.b_set == s2.b_set);

    // p = 0 and p = 1 degenerate cases.
    BlockConstruction empty = sample_case3(setup, 0.0, 7);
    CHECK(case3_t_value(setup, empty) == 0.0);
    BlockConstruction full = sample_case3(setup, 1.0, 7);
    CHECK(case3_t_value(setup, full) ==
          doctest::Approx(setup.t_ones_raw / setup.normalizer()));

    // Exact block evaluation agrees with the generic counter.
    BlockConstruction mid = sample_case3(setup, 0.3, 9);
    std::vector<WeightFunction> fs(4, WeightFunction::ones(900));
    fs[setup.col_n1] = mid.f1;
    fs[setup.col_n2] = mid.f2;
    CutoffSpec cutoff;
    cutoff.image = ImageCutoff::box(2, 0.5);
    CountResult direct = count_fast(sys, 900, cutoff, fs);
    CHECK(case3_t_value(setup, mid) == doctest::Approx(direct.normalized).epsilon(1e-12));

    // Coupling marginal: P(n in A) = p for a few fixed n.
    const double p = 0.2;
    const int trials = 400;
    for (long probe : {5L, 333L, 890L}) {
        int hits = 0;
        for (int t = 0; t < trials; ++t) {
            BlockConstruction s = sample_case3(setup, p, 1000 + t);
            if (s.a_set[probe - 1]) ++hits;
        }
        double freq = static_cast<double>(hits) / trials;
        CHECK(std::fabs(freq - p) <= 3.0 * std::sqrt(p / trials));
    }

    // Independence across distinct blocks: small empirical correlation.
    long n_a = 5;
    long n_b = 5 + static_cast<long>(2.0 * setup.block_len);
    REQUIRE(setup.block_of_n1(static_cast<double>(n_a)) !=
            setup.block_of_n1(static_cast<double>(n_b)));
    double sum_a = 0, sum_b = 0, sum_ab = 0;
    for (int t = 0; t < trials; ++t) {
        BlockConstruction s = sample_case3(setup, p, 5000 + t);
        double xa = s.a_set[n_a - 1], xb = s.a_set[n_b - 1];
        sum_a += xa;
        sum_b += xb;
        sum_ab += xa * xb;
    }
    double cov = sum_ab / trials - (sum_a / trials) * (sum_b / trials);
    double corr = cov / (p * (1 - p));
    CHECK(std::fabs(corr) <= 3.0 / std::sqrt(static_cast<double>(trials)));
}

TEST_CASE("converse_verdict case 3: gap and norm bounds at N=2500") {
    LinearSystem sys = near_degenerate_family(2500);
    ConverseParams params;
    params.detect_threshold = 0.2;
    params.trials = 60;
    params.seed = 11;
    ConverseReport rep = converse_verdict(sys, 2500, params);
    CHECK(rep.case_id == 3);
    CHECK(rep.t_ones > 0.0);
    CHECK(rep.gap_ok);
    CHECK(rep.norm_ok);
    CHECK(rep.rho < 0.5);
}

TEST_CASE("converse_verdict: family norm shrinks with N while the gap persists") {
    ConverseParams params;
    params.detect_threshold = 0.3;
    params.trials = 40;
    params.seed = 3;
    ConverseReport small = converse_verdict(near_degenerate_family(400), 400, params);
    ConverseReport large = converse_verdict(near_degenerate_family(2500), 2500, params);
    CHECK(large.rho < small.rho);
    CHECK(small.gap_ok);
    CHECK(large.gap_ok);
    CHECK(small.t_gap >= 1e-4);
    CHECK(large.t_gap >= 1e-4);
}

TEST_CASE("converse_verdict: UnreachableCase when both b's are small") {
    // Rows nearly proportional: the rank margin hypothesis fails, which is
    // exactly the precluded configuration.
    auto basis = ConstantBasis::sqrt_basis({2, 3});
    LinearSystem sys = LinearSystem::parse_rows(
        basis,
        {{"1", "1", "1*sqrt2", "1*sqrt3"}, {"2", "2+1/1000", "2*sqrt2", "2*sqrt3"}});
    ConverseParams params;
    params.detect_threshold = 0.1;
    CHECK_THROWS_AS(converse_verdict(sys, 100, params), UnreachableCase);
}
