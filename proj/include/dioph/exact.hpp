#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dioph/interval.hpp"
#include "dioph/rational.hpp"

namespace dioph {

struct BasisConstant {
    enum class Kind { Sqrt, Pi, E, Decimal };
    std::string name;
    Kind kind = Kind::Decimal;
    unsigned long sqrt_arg = 0; // for Kind::Sqrt
    std::string decimal;        // for Kind::Decimal
};

// Declared irrational constants. The user contract (not verified) is that
// {1} together with the constants is Q-linearly independent.
class ConstantBasis {
  public:
    ConstantBasis() = default;
    explicit ConstantBasis(std::vector<BasisConstant> constants);

    std::size_t size() const { return constants_.size(); }
    const BasisConstant& constant(std::size_t i) const { return constants_[i]; }
    int index_of(const std::string& name) const; // -1 if absent

    // Enclosure of constant i at >= max(prec, 140) bits, rounded to prec.
    MpInterval value(std::size_t i, mpfr_prec_t prec) const;

    static std::shared_ptr<const ConstantBasis> make(std::vector<BasisConstant> constants);
    static std::shared_ptr<const ConstantBasis> empty();
    // Convenience: {sqrt2}, {sqrt2, sqrt3}, ... for tests and defaults.
    static std::shared_ptr<const ConstantBasis> sqrt_basis(std::vector<unsigned long> args);

  private:
    std::vector<BasisConstant> constants_;
    mutable std::mutex cache_mutex_;
    mutable std::map<mpfr_prec_t, std::vector<MpInterval>> cache_;
};

using BasisPtr = std::shared_ptr<const ConstantBasis>;

// A real number q0 + sum_i q_i * beta_i with rational q_i over a declared basis.
class ExactScalar {
  public:
    ExactScalar() = default;
    ExactScalar(BasisPtr basis, std::vector<Rational> coeffs);

    static ExactScalar from_rational(const BasisPtr& basis, const Rational& q);
    static ExactScalar constant(const BasisPtr& basis, std::size_t index,
                                const Rational& scale = Rational(1));

    const BasisPtr& basis() const { return basis_; }
    const std::vector<Rational>& coeffs() const { return coeffs_; }
    const Rational& rational_part() const { return coeffs_[0]; }
    // Coefficient of basis constant i (i.e. coeffs[i+1]).
    const Rational& coeff_of(std::size_t i) const { return coeffs_[i + 1]; }

    bool is_rational() const;
    bool is_zero() const;

    // Certified enclosure of the value. precision >= 53.
    Interval eval(mpfr_prec_t precision = 106) const;
    MpInterval eval_mp(mpfr_prec_t precision) const;
    double approx() const { return eval(106).mid(); }

    ExactScalar operator+(const ExactScalar& other) const;
    ExactScalar operator-(const ExactScalar& other) const;
    ExactScalar operator-() const;
    // Defined when at least one operand is rational; throws otherwise.
    ExactScalar operator*(const ExactScalar& other) const;
    ExactScalar scaled(const Rational& q) const;

    bool operator==(const ExactScalar& other) const;

    std::string to_string() const;
    // Parses expressions like "-1+1*sqrt2", "5*sqrt3", "1/2".
    static ExactScalar parse(const BasisPtr& basis, const std::string& text);

  private:
    void check_same_basis(const ExactScalar& other) const;

    BasisPtr basis_;
    std::vector<Rational> coeffs_{Rational(0)};
};

// Heuristic LLL probe for a small integer relation q0*1 + sum q_i*beta_i = 0.
// Returns the candidate coefficient vector when one with |q| <= coeff_bound is
// found and numerically confirmed tiny at 300 bits; callers treat it as a
// warning that the declared independence contract looks violated.
std::optional<std::vector<long>> find_integer_relation(const ConstantBasis& basis,
                                                       long coeff_bound = 1000000);

} // namespace dioph
