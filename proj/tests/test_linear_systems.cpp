#include <cmath>
#include <random>

#include "dioph/errors.hpp"
#include "dioph/formal.hpp"
#include "dioph/linear_system.hpp"
#include "doctest.h"

using namespace dioph;

namespace {

LinearSystem sqrt2_1x3() {
    auto basis = ConstantBasis::sqrt_basis({2});
    return LinearSystem::parse_rows(basis, {{"1", "-1*sqrt2", "-1+1*sqrt2"}});
}

// The 2x4 four-term irrational AP system.
LinearSystem example_2x4() {
    auto basis = ConstantBasis::sqrt_basis({2, 3});
    return LinearSystem::parse_rows(
        basis, {{"1", "0", "-1*sqrt2", "-1+1*sqrt2"}, {"0", "1", "-1*sqrt3", "-1+1*sqrt3"}});
}

// The rational-dimension-1 example with Theta = (5 1).
LinearSystem example_u1() {
    auto basis = ConstantBasis::sqrt_basis({2, 3});
    return LinearSystem::parse_rows(
        basis, {{"1", "0", "-1*sqrt2", "-1*sqrt3+1"}, {"0", "1", "5*sqrt2", "5*sqrt3"}});
}

} // namespace

TEST_CASE("rank_matrix: identity extended by a zero column") {
    auto basis = ConstantBasis::empty();
    LinearSystem sys = LinearSystem::parse_rows(basis, {{"1", "0", "0"}, {"0", "1", "0"}});
    RankMatrixInfo info = rank_matrix(sys);
    CHECK(info.columns == std::vector<std::size_t>{0, 1});
    CHECK(info.det == doctest::Approx(1.0));
    CHECK(info.inverse_norm == doctest::Approx(1.0));
}

TEST_CASE("rank_matrix: sqrt2 row picks the largest 1x1 determinant") {
    LinearSystem sys = sqrt2_1x3();
    RankMatrixInfo info = rank_matrix(sys);
    CHECK(info.columns == std::vector<std::size_t>{1});
    CHECK(std::fabs(info.det) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("rank_matrix: 2x4 example has all six 2x2 minors nonzero") {
    LinearSystem sys = example_2x4();
    RankMatrixInfo info = rank_matrix(sys);
    CHECK(std::fabs(info.det) > 0.0);

    std::vector<std::size_t> rows = {0, 1};
    int nonzero = 0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) {
            std::vector<std::vector<ExactScalar>> sub = {
                {sys.entry(0, i), sys.entry(0, j)}, {sys.entry(1, i), sys.entry(1, j)}};
            if (certified_sign(formal_det(sub)) != 0) ++nonzero;
        }
    CHECK(nonzero == 6);
}

TEST_CASE("rank_matrix: exclude_column is honored") {
    LinearSystem sys = sqrt2_1x3();
    RankMatrixInfo info = rank_matrix(sys, 1);
    CHECK(info.columns != std::vector<std::size_t>{1});
}

TEST_CASE("rank_matrix: maximality over all subsets (exhaustive oracle)") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> coeff(-3, 3);
    auto basis = ConstantBasis::sqrt_basis({2});
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::vector<ExactScalar>> rows(2);
        for (auto& r : rows)
            for (int j = 0; j < 4; ++j)
                r.push_back(ExactScalar(
                    basis, {Rational(coeff(rng)), Rational(coeff(rng))}));
        LinearSystem sys(basis, rows);
        RankMatrixInfo info;
        try {
            info = rank_matrix(sys);
        } catch (const RankDeficient&) {
            continue;
        }
        double best = std::fabs(info.det);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i + 1; j < 4; ++j) {
                std::vector<std::vector<ExactScalar>> sub = {
                    {sys.entry(0, i), sys.entry(0, j)}, {sys.entry(1, i), sys.entry(1, j)}};
                FormalPoly det = formal_det(sub);
                if (det.is_zero()) continue;
                CHECK(std::fabs(certified_value(det).mid()) <= best + 1e-9);
            }
    }
}

TEST_CASE("rank_matrix: rank deficiency raises") {
    auto basis = ConstantBasis::empty();
    LinearSystem sys = LinearSystem::parse_rows(basis, {{"1", "2", "0"}, {"2", "4", "0"}});
    CHECK_THROWS_AS(rank_matrix(sys), RankDeficient);
}

TEST_CASE("dual_degeneracy_margin: exact zero for (1,1,0)") {
    auto basis = ConstantBasis::empty();
    LinearSystem sys = LinearSystem::parse_rows(basis, {{"1", "1", "0"}});
    CHECK(dual_degeneracy_margin(sys) == 0.0);
}

TEST_CASE("dual_degeneracy_margin: positive for the sqrt2 system and the 2x4 example") {
    CHECK(dual_degeneracy_margin(sqrt2_1x3()) > 0.0);
    CHECK(dual_degeneracy_margin(example_2x4()) > 0.0);
}

TEST_CASE("dual_degeneracy_margin: DimensionError when d < m+2") {
    auto basis = ConstantBasis::empty();
    LinearSystem sys = LinearSystem::parse_rows(basis, {{"1", "0", "0"}, {"0", "1", "0"}});
    CHECK_THROWS_AS(dual_degeneracy_margin(sys), DimensionError);
}

TEST_CASE("dual degeneracy zero-margin is invariant under rational row operations") {
    auto basis = ConstantBasis::sqrt_basis({2});
    // Rows engineered so that deleting columns {0,1} leaves rank 1 < 2.
    LinearSystem sys = LinearSystem::parse_rows(
        basis, {{"1", "0", "1*sqrt2", "2*sqrt2"}, {"0", "1", "3*sqrt2", "6*sqrt2"}});
    REQUIRE(dual_degeneracy_margin(sys) == 0.0);

    // Multiply on the left by [[2,1],[1,1]].
    std::vector<std::vector<ExactScalar>> rows(2);
    for (std::size_t j = 0; j < 4; ++j) {
        rows[0].push_back(sys.entry(0, j).scaled(Rational(2)) + sys.entry(1, j));
        rows[1].push_back(sys.entry(0, j) + sys.entry(1, j));
    }
    LinearSystem transformed(basis, rows);
    CHECK(dual_degeneracy_margin(transformed) == 0.0);
}

TEST_CASE("rational_structure: the u=1 worked example gives Theta=(5 1)") {
    RationalStructure rs = rational_structure(example_u1());
    REQUIRE(rs.u == 1);
    REQUIRE(rs.theta.size() == 1);
    CHECK(rs.theta[0][0] == 5);
    CHECK(rs.theta[0][1] == 1);
    CHECK(rs.complexity == 5);
}

TEST_CASE("rational_structure: integer matrices have full rational dimension") {
    auto basis = ConstantBasis::empty();
    LinearSystem sys = LinearSystem::parse_rows(basis, {{"1", "-2", "1"}});
    RationalStructure rs = rational_structure(sys);
    CHECK(rs.u == 1);
    REQUIRE(rs.theta.size() == 1);
    CHECK(rs.theta[0][0] == 1);

    // Theta * L = S integral, verified exactly.
    for (std::size_t j = 0; j < sys.d(); ++j) {
        Rational v = rs.theta[0][0] * sys.entry(0, j).rational_part();
        CHECK(is_integer(v));
    }
}

TEST_CASE("rational_structure: purely irrational sqrt2 system") {
    RationalStructure rs = rational_structure(sqrt2_1x3());
    CHECK(rs.u == 0);
    CHECK(rs.purely_irrational());
    CHECK(rs.complexity == 0);
}

TEST_CASE("rational_structure: idempotent on the extracted rational part") {
    RationalStructure rs = rational_structure(example_u1());
    REQUIRE(rs.u == 1);
    // Build Theta*L0 as an integer system and classify it.
    LinearSystem sys = example_u1();
    std::vector<std::string> row;
    for (std::size_t j = 0; j < sys.d(); ++j) {
        Rational v(0);
        for (std::size_t i = 0; i < sys.m(); ++i)
            v += rs.theta[0][i] * sys.entry(i, j).rational_part();
        row.push_back(format_rational(v));
    }
    LinearSystem reduced = LinearSystem::parse_rows(ConstantBasis::empty(), {row});
    CHECK(rational_structure(reduced).u == 1);
}

TEST_CASE("classify caches a full report") {
    LinearSystem sys = example_2x4();
    const ClassificationReport& rep = sys.classify();
    CHECK(rep.rank == 2);
    CHECK(rep.rank_margin > 0.0);
    CHECK(rep.global_rank_margin > 0.0);
    CHECK(rep.dual_degeneracy_margin > 0.0);
    CHECK_FALSE(rep.in_dual_degeneracy_variety);
    CHECK(rep.rational.u == 0);
    const ClassificationReport& again = sys.classify();
    CHECK(&rep == &again);
}
