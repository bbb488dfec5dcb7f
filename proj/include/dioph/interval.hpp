#pragma once

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "dioph/rational.hpp"

namespace dioph {

// Closed enclosure with double endpoints.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains_zero() const { return lo <= 0.0 && hi >= 0.0; }
    bool is_point() const { return lo == hi; }
    // Largest magnitude definitely below the true |value|.
    double mig() const { return contains_zero() ? 0.0 : std::min(std::fabs(lo), std::fabs(hi)); }
    double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }
    bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
};

// Arbitrary-precision enclosure with directed rounding on every operation.
class MpInterval {
  public:
    explicit MpInterval(mpfr_prec_t prec = 106);
    MpInterval(const MpInterval& other);
    MpInterval(MpInterval&& other) noexcept;
    MpInterval& operator=(const MpInterval& other);
    MpInterval& operator=(MpInterval&& other) noexcept;
    ~MpInterval();

    mpfr_prec_t precision() const { return prec_; }

    static MpInterval from_rational(const Rational& q, mpfr_prec_t prec);
    static MpInterval from_decimal(const std::string& s, mpfr_prec_t prec);
    static MpInterval sqrt_ui(unsigned long k, mpfr_prec_t prec);
    static MpInterval pi(mpfr_prec_t prec);
    static MpInterval e(mpfr_prec_t prec);
    static MpInterval zero(mpfr_prec_t prec);

    // Rounds this enclosure outward onto the grid of `prec`-bit floats.
    MpInterval rounded_to(mpfr_prec_t prec) const;

    void add(const MpInterval& other);
    void sub(const MpInterval& other);
    void mul(const MpInterval& other);
    void mul_rational(const Rational& q);
    void neg();

    bool contains_zero() const;
    int sign() const; // -1, 0 (straddles), +1
    bool is_exact_zero() const;

    Interval to_double() const;

  private:
    mpfr_prec_t prec_;
    mpfr_t lo_;
    mpfr_t hi_;
};

} // namespace dioph
