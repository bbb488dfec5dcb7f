#include <random>

#include "dioph/exact.hpp"
#include "dioph/errors.hpp"
#include "dioph/formal.hpp"
#include "doctest.h"

using namespace dioph;

namespace {
// 40-digit reference value used as the independent oracle for sqrt(2).
const char* kSqrt2Digits = "1.4142135623730950488016887242096980785697";
}

TEST_CASE("eval: rational scalars give zero-width intervals on representable values") {
    auto basis = ConstantBasis::sqrt_basis({2});
    auto one = ExactScalar::parse(basis, "1");
    Interval iv = one.eval(53);
    CHECK(iv.lo == 1.0);
    CHECK(iv.hi == 1.0);

    auto half = ExactScalar::parse(basis, "1/2");
    iv = half.eval(106);
    CHECK(iv.lo == 0.5);
    CHECK(iv.hi == 0.5);
}

TEST_CASE("eval: sqrt2 enclosure against the decimal oracle") {
    auto basis = ConstantBasis::sqrt_basis({2});
    auto r2 = ExactScalar::parse(basis, "sqrt2");
    Interval iv = r2.eval(53);
    double oracle = std::stod(kSqrt2Digits);
    CHECK(iv.lo <= oracle);
    CHECK(iv.hi >= oracle);
    CHECK(iv.width() <= 1e-15);

    auto x = ExactScalar::parse(basis, "-1+1*sqrt2");
    iv = x.eval(106);
    CHECK(iv.lo <= 0.4142135623730951);
    CHECK(iv.hi >= 0.4142135623730950);
    CHECK(iv.width() <= 1e-15);
}

TEST_CASE("eval: interval width contract and monotonicity in precision") {
    auto basis = ConstantBasis::sqrt_basis({2, 3});
    auto x = ExactScalar::parse(basis, "7/3-2*sqrt2+5*sqrt3");
    Interval at53 = x.eval(53);
    Interval at106 = x.eval(106);
    Interval at212 = x.eval(212);
    CHECK(at53.contains(at106));
    CHECK(at106.contains(at212));
    // magnitude ~ |7/3| + |2*sqrt2| + |5*sqrt3| < 14
    CHECK(at53.width() <= std::ldexp(14.0, -51));
}

TEST_CASE("is_rational") {
    auto basis = ConstantBasis::sqrt_basis({2});
    CHECK(ExactScalar::parse(basis, "3/2").is_rational());
    CHECK_FALSE(ExactScalar::parse(basis, "sqrt2").is_rational());
    CHECK(ExactScalar::parse(basis, "5+0*sqrt2").is_rational());
    CHECK(ExactScalar::parse(basis, "sqrt2-sqrt2+5").is_rational());
}

TEST_CASE("ring laws hold exactly on coefficient vectors") {
    auto basis = ConstantBasis::sqrt_basis({2, 3});
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 7);
    auto random_scalar = [&]() {
        std::vector<Rational> c;
        for (int i = 0; i < 3; ++i) c.emplace_back(num(rng), den(rng));
        return ExactScalar(basis, std::move(c));
    };
    for (int trial = 0; trial < 50; ++trial) {
        ExactScalar a = random_scalar();
        ExactScalar b = random_scalar();
        ExactScalar c = random_scalar();
        CHECK((a + b) + c == a + (b + c));
        ExactScalar r = ExactScalar::from_rational(basis, Rational(num(rng), den(rng)));
        CHECK(r * (b + c) == r * b + r * c);
    }
}

TEST_CASE("product of two irrational scalars is rejected") {
    auto basis = ConstantBasis::sqrt_basis({2});
    auto r2 = ExactScalar::parse(basis, "sqrt2");
    CHECK_THROWS_AS(r2 * r2, Error);
}

TEST_CASE("parse/format round-trip is coefficient-exact") {
    auto basis = ConstantBasis::sqrt_basis({2, 3});
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> num(-20, 20);
    std::uniform_int_distribution<int> den(1, 9);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Rational> c;
        for (int i = 0; i < 3; ++i) c.emplace_back(num(rng), den(rng));
        ExactScalar x(basis, std::move(c));
        CHECK(ExactScalar::parse(basis, x.to_string()) == x);
    }
}

TEST_CASE("declared-independence warning fires on a planted relation") {
    // sqrt2 plus a decimal equal to -sqrt2 truncated: relation 1*b0 + 1*b1 ~ 0
    // is only approximate, so it must NOT fire; a genuinely rational "constant"
    // equal to 3/2 gives the exact relation 3 - 2*c = 0.
    auto honest = ConstantBasis::sqrt_basis({2, 3});
    CHECK_FALSE(find_integer_relation(*honest).has_value());

    BasisConstant fake;
    fake.name = "c";
    fake.kind = BasisConstant::Kind::Decimal;
    fake.decimal = "1.5";
    auto rigged = ConstantBasis::make({fake});
    auto rel = find_integer_relation(*rigged);
    REQUIRE(rel.has_value());
    CHECK(rel->size() == 2);
    // q0 + q1 * 1.5 == 0 for the reported coefficients.
    CHECK(2 * (*rel)[0] + 3 * (*rel)[1] == 0);
}

TEST_CASE("formal determinants certify exact zeros and signs") {
    auto basis = ConstantBasis::sqrt_basis({2});
    auto p = [&](const char* s) { return ExactScalar::parse(basis, s); };

    // Rows (1, sqrt2), (2, 2*sqrt2): determinant cancels exactly.
    FormalPoly d = formal_det({{p("1"), p("sqrt2")}, {p("2"), p("2*sqrt2")}});
    CHECK(d.is_zero());
    CHECK(certified_sign(d) == 0);

    // det [[1, sqrt2],[sqrt2, 1]] = 1 - 2 = -1.
    FormalPoly d2 = formal_det({{p("1"), p("sqrt2")}, {p("sqrt2"), p("1")}});
    CHECK(certified_sign(d2) == -1);
    Interval v = certified_value(d2);
    CHECK(v.lo <= -1.0);
    CHECK(v.hi >= -1.0);
    CHECK(v.width() < 1e-12);
}
