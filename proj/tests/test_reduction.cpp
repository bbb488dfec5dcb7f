#include <random>

#include "dioph/approx.hpp"
#include "dioph/errors.hpp"
#include "dioph/reduction.hpp"
#include "doctest.h"

using namespace dioph;

namespace {

// The rational-dimension-1 worked example with Theta = (5 1).
LinearSystem example_u1() {
    auto basis = ConstantBasis::sqrt_basis({2, 3});
    return LinearSystem::parse_rows(
        basis, {{"1", "0", "-1*sqrt2", "-1*sqrt3+1"}, {"0", "1", "5*sqrt2", "5*sqrt3"}});
}

LinearSystem sqrt2_1x3() {
    auto basis = ConstantBasis::sqrt_basis({2});
    return LinearSystem::parse_rows(basis, {{"1", "-1*sqrt2", "-1+1*sqrt2"}});
}

} // namespace

TEST_CASE("image_lattice_basis: gcd example from the Theta L0 of the worked system") {
    ImageLatticeBasis b = image_lattice_basis({{5, 1, 0, 5}});
    REQUIRE(b.basis.size() == 1);
    CHECK(b.basis[0][0] == 1);
    mpz_class img = 0;
    ZVec s = {5, 1, 0, 5};
    for (std::size_t j = 0; j < 4; ++j) img += s[j] * b.lifts[0][j];
    CHECK(img == 1);
    // Babai reduction keeps the lift small.
    for (const auto& v : b.lifts[0]) CHECK(abs(v) <= 2);
}

TEST_CASE("image_lattice_basis: identity and (2 4)") {
    ImageLatticeBasis id = image_lattice_basis({{1, 0}, {0, 1}});
    CHECK(id.basis.size() == 2);
    CHECK(id.lifts[0] == ZVec{1, 0});
    CHECK(id.lifts[1] == ZVec{0, 1});

    ImageLatticeBasis g = image_lattice_basis({{2, 4}});
    REQUIRE(g.basis.size() == 1);
    CHECK(g.basis[0][0] == 2);

    CHECK_THROWS_AS(image_lattice_basis({{1, 1}, {2, 2}}), NotSurjective);
}

TEST_CASE("reduce: worked 2x4 example gives a 3-column Xi and purely irrational 1x3 L'") {
    LinearSystem sys = example_u1();
    ReductionBundle bundle = reduce(sys, 0.5);
    CHECK(bundle.u == 1);
    CHECK(bundle.h() == 3);
    REQUIRE(bundle.l_prime);
    CHECK(bundle.l_prime->m() == 1);
    CHECK(bundle.l_prime->d() == 3);
    CHECK(rational_structure(*bundle.l_prime).u == 0);
    CHECK(bundle.shifts.size() >= 1);
    CHECK(bundle.dual_pair_margin > 0.0);

    // Theta L Xi = 0 holds exactly by construction; spot-check numerically too.
    for (std::size_t t = 0; t < bundle.h(); ++t) {
        double acc = 0.0;
        for (std::size_t j = 0; j < sys.d(); ++j) {
            double entry = 5.0 * sys.entry(0, j).approx() + sys.entry(1, j).approx();
            acc += entry * mpz_get_d(bundle.xi[j][t].get_mpz_t());
        }
        CHECK(std::fabs(acc) < 1e-9);
    }
}

TEST_CASE("reduce: integer system refuses with UseRationalPath") {
    auto sys = LinearSystem::parse_rows(ConstantBasis::empty(), {{"1", "-2", "1"}});
    CHECK_THROWS_AS(reduce(sys, 0.5), UseRationalPath);
}

TEST_CASE("reduce: u=0 gives the identity bundle") {
    LinearSystem sys = sqrt2_1x3();
    ReductionBundle bundle = reduce(sys, 0.5);
    CHECK(bundle.u == 0);
    CHECK(bundle.h() == 3);
    CHECK(bundle.shifts.size() == 1);
    for (const auto& v : bundle.shifts[0]) CHECK(v == 0);
    CHECK(bundle.l_prime->rows()[0][0] == sys.entry(0, 0));
}

TEST_CASE("decomposition identity: worked example, ones weights, exact zero difference") {
    // The literal worked matrix has an all-positive second row, so both sides
    // vanish on [N]^4; the identity must still hold exactly.
    LinearSystem sys = example_u1();
    ReductionBundle bundle = reduce(sys, 0.5);
    const long n = 30;
    std::vector<WeightFunction> fs(4, WeightFunction::ones(n));
    DecompositionCheck check = verify_decomposition(sys, bundle, n, fs);
    CHECK(check.max_abs_diff == 0.0);
}

TEST_CASE("decomposition identity: sign-mixed u=1 system with genuine solutions") {
    auto basis = ConstantBasis::sqrt_basis({2, 3});
    // 5*row1 + row2 = (5, 1, -8, -4): Theta = (5 1) is still a rational map,
    // and both rows change sign on the positive orthant.
    LinearSystem sys = LinearSystem::parse_rows(
        basis,
        {{"1", "0", "-1*sqrt2", "-1*sqrt3+1"}, {"0", "1", "5*sqrt2-8", "5*sqrt3-9"}});
    REQUIRE(rational_structure(sys).u == 1);
    ReductionBundle bundle = reduce(sys, 0.5);
    const long n = 30;
    std::vector<WeightFunction> fs(4, WeightFunction::ones(n));
    DecompositionCheck check = verify_decomposition(sys, bundle, n, fs);
    CHECK(check.lhs > 0.0);
    CHECK(check.rhs == check.lhs);
    CHECK(check.max_abs_diff == 0.0);
}

TEST_CASE("decomposition identity: random +-1 weights, exact zero difference") {
    LinearSystem sys = example_u1();
    ReductionBundle bundle = reduce(sys, 0.5);
    const long n = 20;
    std::mt19937 rng(31);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<WeightFunction> fs;
        for (int j = 0; j < 4; ++j) {
            std::vector<double> v(n);
            for (auto& x : v) x = coin(rng) ? 1.0 : -1.0;
            fs.push_back(WeightFunction::from_values(std::move(v)));
        }
        DecompositionCheck check = verify_decomposition(sys, bundle, n, fs);
        CHECK(check.max_abs_diff == 0.0);
    }
}

TEST_CASE("decomposition identity: tiny eps empties both sides") {
    LinearSystem sys = example_u1();
    ReductionBundle bundle = reduce(sys, 1e-9);
    const long n = 15;
    std::vector<WeightFunction> fs(4, WeightFunction::ones(n));
    DecompositionCheck check = verify_decomposition(sys, bundle, n, fs);
    CHECK(check.lhs == 0.0);
    CHECK(check.rhs == 0.0);
}

TEST_CASE("decomposition identity: u=0 trivial bundle reproduces the count") {
    LinearSystem sys = sqrt2_1x3();
    ReductionBundle bundle = reduce(sys, 0.5);
    const long n = 25;
    std::vector<WeightFunction> fs(3, WeightFunction::ones(n));
    DecompositionCheck check = verify_decomposition(sys, bundle, n, fs);
    CHECK(check.lhs > 0.0);
    CHECK(check.max_abs_diff == 0.0);
}

TEST_CASE("row_multiple_margin: identical rows, diagonal rows, mixed") {
    CHECK(row_multiple_margin({{1.0, 2.0}, {1.0, 2.0}, {0.0, 1.0}}) == 0.0);
    // Diagonal rows are pairwise orthogonal: residual = row norm.
    CHECK(row_multiple_margin({{3.0, 0.0}, {0.0, 2.0}}) == doctest::Approx(2.0));
    // A scaled copy is a multiple.
    CHECK(row_multiple_margin({{1.0, 1.0}, {-2.0, -2.0}, {0.0, 5.0}}) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("kernel_parametrization_check: two-dimensional kernel cases") {
    auto basis = ConstantBasis::sqrt_basis({2});
    // L' = (1, -sqrt2, sqrt2-1): kernel dimension 2.
    auto lp = LinearSystem::parse_rows(basis, {{"1", "-1*sqrt2", "-1+1*sqrt2"}});

    // Xi with two identical rows forces margin 0.
    ZMat xi_dup = {{1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    CHECK(kernel_parametrization_check(xi_dup, lp) == doctest::Approx(0.0).epsilon(1e-12));

    // The identity embedding keeps a positive margin (the system itself is
    // outside the dual degeneracy variety).
    ZMat xi_id = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    CHECK(kernel_parametrization_check(xi_id, lp) > 0.05);
}

TEST_CASE("saturation: reduce applied to random u>=1 systems keeps the identity exact") {
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> small(-2, 2);
    auto basis = ConstantBasis::sqrt_basis({2});
    int done = 0;
    while (done < 5) {
        // Row 2 is integral, row 1 mixes sqrt2: rational dimension 1.
        std::vector<std::vector<ExactScalar>> rows(2);
        for (int j = 0; j < 4; ++j) {
            rows[0].push_back(ExactScalar(basis, {Rational(small(rng)), Rational(small(rng))}));
            rows[1].push_back(ExactScalar(basis, {Rational(small(rng)), Rational(0)}));
        }
        LinearSystem sys(basis, rows);
        ReductionBundle bundle;
        try {
            if (rational_structure(sys).u != 1) continue;
            bundle = reduce(sys, 0.5);
        } catch (const Error&) {
            continue;
        }
        const long n = 10;
        std::vector<WeightFunction> fs(4, WeightFunction::ones(n));
        DecompositionCheck check = verify_decomposition(sys, bundle, n, fs);
        CHECK(check.max_abs_diff == 0.0);
        ++done;
    }
}

TEST_CASE("approximation function transfer between L and L' (advisory)") {
    // Two-sided comparability of the certified bounds on a tau grid; the
    // quantitative constants are not contractual, so log rather than assert
    // beyond a wide envelope.
    LinearSystem sys = example_u1();
    ReductionBundle bundle = reduce(sys, 0.5);
    REQUIRE(bundle.l_prime);
    for (double tau2 : {0.5, 0.25}) {
        ApproxQuery q;
        q.tau1 = 0.25;
        q.tau2 = tau2;
        q.delta = 2e-3;
        double upper_l = approx_upper(sys, q).upper_bound;
        double upper_lp = approx_upper(*bundle.l_prime, q).upper_bound;
        CAPTURE(tau2);
        CAPTURE(upper_l);
        CAPTURE(upper_lp);
        bool comparable = upper_lp <= 100.0 * upper_l + 1e-9 &&
                          upper_l <= 100.0 * upper_lp + 1e-9;
        WARN_MESSAGE(comparable, "transfer ratio outside the advisory factor-100 envelope");
    }
}
