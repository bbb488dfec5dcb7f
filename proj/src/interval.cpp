#include "dioph/interval.hpp"

#include <array>

#include "dioph/errors.hpp"

namespace dioph {

MpInterval::MpInterval(mpfr_prec_t prec) : prec_(prec) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
}

MpInterval::MpInterval(const MpInterval& other) : prec_(other.prec_) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

MpInterval::MpInterval(MpInterval&& other) noexcept : prec_(other.prec_) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_swap(lo_, other.lo_);
    mpfr_swap(hi_, other.hi_);
}

MpInterval& MpInterval::operator=(const MpInterval& other) {
    if (this != &other) {
        if (prec_ != other.prec_) {
            mpfr_set_prec(lo_, other.prec_);
            mpfr_set_prec(hi_, other.prec_);
            prec_ = other.prec_;
        }
        mpfr_set(lo_, other.lo_, MPFR_RNDD);
        mpfr_set(hi_, other.hi_, MPFR_RNDU);
    }
    return *this;
}

MpInterval& MpInterval::operator=(MpInterval&& other) noexcept {
    if (this != &other) {
        mpfr_swap(lo_, other.lo_);
        mpfr_swap(hi_, other.hi_);
        std::swap(prec_, other.prec_);
    }
    return *this;
}

MpInterval::~MpInterval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

MpInterval MpInterval::from_rational(const Rational& q, mpfr_prec_t prec) {
    MpInterval r(prec);
    mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
    return r;
}

MpInterval MpInterval::from_decimal(const std::string& s, mpfr_prec_t prec) {
    // Treat the decimal string as the exact rational it denotes.
    return from_rational(parse_rational(s), prec);
}

MpInterval MpInterval::sqrt_ui(unsigned long k, mpfr_prec_t prec) {
    MpInterval r(prec);
    mpfr_sqrt_ui(r.lo_, k, MPFR_RNDD);
    mpfr_sqrt_ui(r.hi_, k, MPFR_RNDU);
    return r;
}

MpInterval MpInterval::pi(mpfr_prec_t prec) {
    MpInterval r(prec);
    mpfr_const_pi(r.lo_, MPFR_RNDD);
    mpfr_const_pi(r.hi_, MPFR_RNDU);
    return r;
}

MpInterval MpInterval::e(mpfr_prec_t prec) {
    MpInterval r(prec);
    mpfr_t one;
    mpfr_init2(one, prec);
    mpfr_set_ui(one, 1, MPFR_RNDN);
    mpfr_exp(r.lo_, one, MPFR_RNDD);
    mpfr_exp(r.hi_, one, MPFR_RNDU);
    mpfr_clear(one);
    return r;
}

MpInterval MpInterval::zero(mpfr_prec_t prec) { return MpInterval(prec); }

MpInterval MpInterval::rounded_to(mpfr_prec_t prec) const {
    MpInterval r(prec);
    mpfr_set(r.lo_, lo_, MPFR_RNDD);
    mpfr_set(r.hi_, hi_, MPFR_RNDU);
    return r;
}

void MpInterval::add(const MpInterval& other) {
    mpfr_add(lo_, lo_, other.lo_, MPFR_RNDD);
    mpfr_add(hi_, hi_, other.hi_, MPFR_RNDU);
}

void MpInterval::sub(const MpInterval& other) {
    mpfr_t tmp;
    mpfr_init2(tmp, prec_);
    mpfr_sub(tmp, lo_, other.hi_, MPFR_RNDD);
    mpfr_sub(hi_, hi_, other.lo_, MPFR_RNDU);
    mpfr_set(lo_, tmp, MPFR_RNDD);
    mpfr_clear(tmp);
}

void MpInterval::neg() {
    mpfr_swap(lo_, hi_);
    mpfr_neg(lo_, lo_, MPFR_RNDD);
    mpfr_neg(hi_, hi_, MPFR_RNDU);
}

void MpInterval::mul(const MpInterval& other) {
    // min/max over the four endpoint products, rounded outward.
    mpfr_t cand, best_lo, best_hi;
    mpfr_init2(cand, prec_);
    mpfr_init2(best_lo, prec_);
    mpfr_init2(best_hi, prec_);

    const mpfr_srcptr a[2] = {lo_, hi_};
    const mpfr_srcptr b[2] = {other.lo_, other.hi_};
    bool first = true;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            mpfr_mul(cand, a[i], b[j], MPFR_RNDD);
            if (first || mpfr_cmp(cand, best_lo) < 0) mpfr_set(best_lo, cand, MPFR_RNDD);
            mpfr_mul(cand, a[i], b[j], MPFR_RNDU);
            if (first || mpfr_cmp(cand, best_hi) > 0) mpfr_set(best_hi, cand, MPFR_RNDU);
            first = false;
        }
    mpfr_set(lo_, best_lo, MPFR_RNDD);
    mpfr_set(hi_, best_hi, MPFR_RNDU);
    mpfr_clear(cand);
    mpfr_clear(best_lo);
    mpfr_clear(best_hi);
}

void MpInterval::mul_rational(const Rational& q) {
    int s = sgn(q);
    if (s == 0) {
        mpfr_set_zero(lo_, 1);
        mpfr_set_zero(hi_, 1);
        return;
    }
    if (s > 0) {
        mpfr_mul_q(lo_, lo_, q.get_mpq_t(), MPFR_RNDD);
        mpfr_mul_q(hi_, hi_, q.get_mpq_t(), MPFR_RNDU);
    } else {
        mpfr_t tmp;
        mpfr_init2(tmp, prec_);
        mpfr_mul_q(tmp, hi_, q.get_mpq_t(), MPFR_RNDD);
        mpfr_mul_q(hi_, lo_, q.get_mpq_t(), MPFR_RNDU);
        mpfr_set(lo_, tmp, MPFR_RNDD);
        mpfr_clear(tmp);
    }
}

bool MpInterval::contains_zero() const {
    return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0;
}

int MpInterval::sign() const {
    if (mpfr_sgn(lo_) > 0) return 1;
    if (mpfr_sgn(hi_) < 0) return -1;
    return 0;
}

bool MpInterval::is_exact_zero() const { return mpfr_zero_p(lo_) && mpfr_zero_p(hi_); }

Interval MpInterval::to_double() const {
    Interval r;
    r.lo = mpfr_get_d(lo_, MPFR_RNDD);
    r.hi = mpfr_get_d(hi_, MPFR_RNDU);
    return r;
}

} // namespace dioph
