#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "dioph/errors.hpp"

namespace dioph {

using Rational = mpq_class;

inline Rational rat(long num, long den = 1) { return Rational(num, den); }

// Parses "p", "p/q", or a plain decimal like "-0.25" into an exact rational.
Rational parse_rational(const std::string& text);

std::string format_rational(const Rational& q);

// Smallest t > 0 such that t*v is an integer vector; t = lcm(dens)/gcd(scaled nums).
Rational minimal_integer_scale(const std::vector<Rational>& v);

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

// Exact conversion when the value fits; throws otherwise.
std::int64_t to_int64(const Rational& q);

} // namespace dioph
