#pragma once

#include <map>
#include <utility>
#include <vector>

#include "dioph/exact.hpp"

namespace dioph {

// Sorted (constant index, exponent) pairs; empty = the rational monomial 1.
using Monomial = std::vector<std::pair<int, int>>;

// Polynomial in the basis constants with rational coefficients. Products of
// scalars leave the linear span, so determinant work happens here instead.
// A poly with no terms is identically zero regardless of the independence
// contract, which is what makes exact rank-deficiency certificates possible.
class FormalPoly {
  public:
    FormalPoly() = default;
    explicit FormalPoly(BasisPtr basis) : basis_(std::move(basis)) {}

    static FormalPoly from_scalar(const ExactScalar& x);

    bool is_zero() const { return terms_.empty(); }
    const BasisPtr& basis() const { return basis_; }

    FormalPoly operator+(const FormalPoly& other) const;
    FormalPoly operator-(const FormalPoly& other) const;
    FormalPoly operator*(const FormalPoly& other) const;

    MpInterval eval_mp(mpfr_prec_t prec) const;

  private:
    void add_term(const Monomial& m, const Rational& q);

    BasisPtr basis_;
    std::map<Monomial, Rational> terms_;
};

// Exact determinant of a square ExactScalar matrix, expanded formally.
FormalPoly formal_det(const std::vector<std::vector<ExactScalar>>& rows);

// Sign of a formal polynomial value, certified by interval evaluation with
// precision escalation 106 -> 212 -> 424 bits. Zero polynomials return 0
// exactly; a nonzero polynomial whose interval still straddles zero at 424
// bits throws AmbiguousValue.
int certified_sign(const FormalPoly& p);

// Certified enclosure at the first precision that separates it from zero
// (or the 424-bit enclosure for exact zeros).
Interval certified_value(const FormalPoly& p);

} // namespace dioph
