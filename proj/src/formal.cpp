#include "dioph/formal.hpp"

#include <algorithm>

#include "dioph/errors.hpp"

namespace dioph {

FormalPoly FormalPoly::from_scalar(const ExactScalar& x) {
    FormalPoly p(x.basis());
    const auto& c = x.coeffs();
    if (c[0] != 0) p.terms_.emplace(Monomial{}, c[0]);
    for (std::size_t i = 1; i < c.size(); ++i)
        if (c[i] != 0) p.terms_.emplace(Monomial{{static_cast<int>(i) - 1, 1}}, c[i]);
    return p;
}

void FormalPoly::add_term(const Monomial& m, const Rational& q) {
    if (q == 0) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, q);
    } else {
        it->second += q;
        if (it->second == 0) terms_.erase(it);
    }
}

FormalPoly FormalPoly::operator+(const FormalPoly& other) const {
    FormalPoly r(*this);
    if (!r.basis_) r.basis_ = other.basis_;
    for (const auto& [m, q] : other.terms_) r.add_term(m, q);
    return r;
}

FormalPoly FormalPoly::operator-(const FormalPoly& other) const {
    FormalPoly r(*this);
    if (!r.basis_) r.basis_ = other.basis_;
    for (const auto& [m, q] : other.terms_) r.add_term(m, -q);
    return r;
}

FormalPoly FormalPoly::operator*(const FormalPoly& other) const {
    FormalPoly r(basis_ ? basis_ : other.basis_);
    for (const auto& [ma, qa] : terms_) {
        for (const auto& [mb, qb] : other.terms_) {
            // Merge exponent maps.
            Monomial m;
            m.reserve(ma.size() + mb.size());
            std::size_t i = 0, j = 0;
            while (i < ma.size() || j < mb.size()) {
                if (j == mb.size() || (i < ma.size() && ma[i].first < mb[j].first)) {
                    m.push_back(ma[i++]);
                } else if (i == ma.size() || mb[j].first < ma[i].first) {
                    m.push_back(mb[j++]);
                } else {
                    m.emplace_back(ma[i].first, ma[i].second + mb[j].second);
                    ++i;
                    ++j;
                }
            }
            r.add_term(m, qa * qb);
        }
    }
    return r;
}

MpInterval FormalPoly::eval_mp(mpfr_prec_t prec) const {
    mpfr_prec_t inner = prec + 32;
    MpInterval acc = MpInterval::zero(inner);
    for (const auto& [m, q] : terms_) {
        MpInterval term = MpInterval::from_rational(q, inner);
        for (const auto& [idx, exp] : m) {
            MpInterval base = basis_->value(static_cast<std::size_t>(idx), inner);
            for (int e = 0; e < exp; ++e) term.mul(base);
        }
        acc.add(term);
    }
    return acc.rounded_to(prec);
}

namespace {

FormalPoly det_expand(const std::vector<std::vector<ExactScalar>>& rows,
                      std::vector<std::size_t>& cols, std::size_t row, const BasisPtr& basis) {
    FormalPoly acc(basis);
    if (cols.empty()) {
        acc = acc + FormalPoly::from_scalar(ExactScalar::from_rational(basis, Rational(1)));
        return acc;
    }
    for (std::size_t k = 0; k < cols.size(); ++k) {
        std::size_t c = cols[k];
        if (rows[row][c].is_zero()) continue;
        std::vector<std::size_t> rest;
        rest.reserve(cols.size() - 1);
        for (std::size_t t = 0; t < cols.size(); ++t)
            if (t != k) rest.push_back(cols[t]);
        FormalPoly sub = det_expand(rows, rest, row + 1, basis);
        FormalPoly term = FormalPoly::from_scalar(rows[row][c]) * sub;
        if (k % 2 == 0)
            acc = acc + term;
        else
            acc = acc - term;
    }
    return acc;
}

} // namespace

FormalPoly formal_det(const std::vector<std::vector<ExactScalar>>& rows) {
    const std::size_t n = rows.size();
    for (const auto& r : rows)
        if (r.size() != n) throw DimensionError("formal_det needs a square matrix");
    BasisPtr basis = n > 0 ? rows[0][0].basis() : ConstantBasis::empty();
    std::vector<std::size_t> cols(n);
    for (std::size_t i = 0; i < n; ++i) cols[i] = i;
    return det_expand(rows, cols, 0, basis);
}

int certified_sign(const FormalPoly& p) {
    if (p.is_zero()) return 0;
    for (mpfr_prec_t prec : {106, 212, 424}) {
        int s = p.eval_mp(prec).sign();
        if (s != 0) return s;
    }
    throw AmbiguousValue("nonzero polynomial not separated from zero at 424 bits");
}

Interval certified_value(const FormalPoly& p) {
    if (p.is_zero()) return Interval{0.0, 0.0};
    MpInterval last = p.eval_mp(106);
    if (last.sign() != 0) return last.to_double();
    for (mpfr_prec_t prec : {212, 424}) {
        last = p.eval_mp(prec);
        if (last.sign() != 0) return last.to_double();
    }
    throw AmbiguousValue("nonzero polynomial not separated from zero at 424 bits");
}

} // namespace dioph
