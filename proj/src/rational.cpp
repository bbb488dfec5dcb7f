#include "dioph/rational.hpp"

#include <cctype>

namespace dioph {

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw ParseError("empty rational literal");

    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t frac_len = s.size() - dot - 1;
        if (digits.empty() || digits == "-" || digits == "+")
            throw ParseError("bad decimal literal: " + text);
        mpz_class num;
        if (num.set_str(digits, 10) != 0) throw ParseError("bad decimal literal: " + text);
        mpz_class den = 1;
        for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
        Rational q(num, den);
        q.canonicalize();
        return q;
    }

    Rational q;
    if (q.set_str(s, 10) != 0) throw ParseError("bad rational literal: " + text);
    q.canonicalize();
    if (q.get_den() == 0) throw ParseError("zero denominator: " + text);
    return q;
}

std::string format_rational(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational minimal_integer_scale(const std::vector<Rational>& v) {
    mpz_class den_lcm = 1;
    for (const auto& x : v) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), x.get_den().get_mpz_t());
    mpz_class num_gcd = 0;
    for (const auto& x : v) {
        mpz_class scaled = x.get_num() * (den_lcm / x.get_den());
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), scaled.get_mpz_t());
    }
    if (num_gcd == 0) return Rational(1); // zero vector
    Rational t(den_lcm, num_gcd);
    t.canonicalize();
    if (t < 0) t = -t;
    return t;
}

std::int64_t to_int64(const Rational& q) {
    if (q.get_den() != 1) throw Error("not an integer: " + format_rational(q));
    if (!q.get_num().fits_slong_p()) throw Error("integer out of int64 range");
    return static_cast<std::int64_t>(q.get_num().get_si());
}

} // namespace dioph
