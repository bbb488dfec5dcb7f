#include "dioph/exact.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "dioph/errors.hpp"

namespace dioph {

namespace {
constexpr mpfr_prec_t kConstantPrecFloor = 140; // >= 40 decimal digits
}

ConstantBasis::ConstantBasis(std::vector<BasisConstant> constants)
    : constants_(std::move(constants)) {
    std::set<std::string> names;
    for (const auto& c : constants_) {
        if (c.name.empty() || c.name == "1") throw Error("bad constant name");
        if (!names.insert(c.name).second) throw Error("duplicate constant name: " + c.name);
        if (c.kind == BasisConstant::Kind::Sqrt && c.sqrt_arg == 0)
            throw Error("sqrt constant must have nonzero argument");
        if (c.kind == BasisConstant::Kind::Decimal) {
            Rational v = parse_rational(c.decimal);
            if (v == 0) throw Error("constant " + c.name + " must be nonzero");
        }
    }
}

int ConstantBasis::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < constants_.size(); ++i)
        if (constants_[i].name == name) return static_cast<int>(i);
    return -1;
}

MpInterval ConstantBasis::value(std::size_t i, mpfr_prec_t prec) const {
    mpfr_prec_t work = std::max(prec, kConstantPrecFloor);
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(work);
        if (it == cache_.end()) {
            std::vector<MpInterval> vals;
            vals.reserve(constants_.size());
            for (const auto& c : constants_) {
                switch (c.kind) {
                case BasisConstant::Kind::Sqrt:
                    vals.push_back(MpInterval::sqrt_ui(c.sqrt_arg, work));
                    break;
                case BasisConstant::Kind::Pi:
                    vals.push_back(MpInterval::pi(work));
                    break;
                case BasisConstant::Kind::E:
                    vals.push_back(MpInterval::e(work));
                    break;
                case BasisConstant::Kind::Decimal:
                    vals.push_back(MpInterval::from_decimal(c.decimal, work));
                    break;
                }
            }
            it = cache_.emplace(work, std::move(vals)).first;
        }
        return it->second[i].rounded_to(prec);
    }
}

std::shared_ptr<const ConstantBasis> ConstantBasis::make(std::vector<BasisConstant> constants) {
    return std::make_shared<const ConstantBasis>(std::move(constants));
}

std::shared_ptr<const ConstantBasis> ConstantBasis::empty() {
    static std::shared_ptr<const ConstantBasis> instance = std::make_shared<const ConstantBasis>();
    return instance;
}

std::shared_ptr<const ConstantBasis> ConstantBasis::sqrt_basis(std::vector<unsigned long> args) {
    std::vector<BasisConstant> cs;
    for (unsigned long a : args) {
        BasisConstant c;
        c.name = "sqrt" + std::to_string(a);
        c.kind = BasisConstant::Kind::Sqrt;
        c.sqrt_arg = a;
        cs.push_back(std::move(c));
    }
    return make(std::move(cs));
}

ExactScalar::ExactScalar(BasisPtr basis, std::vector<Rational> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
    if (!basis_) basis_ = ConstantBasis::empty();
    if (coeffs_.size() != basis_->size() + 1)
        throw DimensionError("coefficient vector size does not match basis");
    for (auto& q : coeffs_) q.canonicalize();
}

ExactScalar ExactScalar::from_rational(const BasisPtr& basis, const Rational& q) {
    const BasisPtr& b = basis ? basis : ConstantBasis::empty();
    std::vector<Rational> c(b->size() + 1, Rational(0));
    c[0] = q;
    return ExactScalar(b, std::move(c));
}

ExactScalar ExactScalar::constant(const BasisPtr& basis, std::size_t index, const Rational& scale) {
    std::vector<Rational> c(basis->size() + 1, Rational(0));
    c.at(index + 1) = scale;
    return ExactScalar(basis, std::move(c));
}

bool ExactScalar::is_rational() const {
    for (std::size_t i = 1; i < coeffs_.size(); ++i)
        if (coeffs_[i] != 0) return false;
    return true;
}

bool ExactScalar::is_zero() const {
    for (const auto& q : coeffs_)
        if (q != 0) return false;
    return true;
}

MpInterval ExactScalar::eval_mp(mpfr_prec_t precision) const {
    mpfr_prec_t inner = precision + 32;
    MpInterval acc = MpInterval::from_rational(coeffs_[0], inner);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == 0) continue;
        MpInterval term = basis_->value(i - 1, inner);
        term.mul_rational(coeffs_[i]);
        acc.add(term);
    }
    return acc.rounded_to(precision);
}

Interval ExactScalar::eval(mpfr_prec_t precision) const {
    if (precision < 53) throw Error("eval precision must be >= 53 bits");
    if (is_rational()) {
        // Exact when the rational is a double; zero-width in that case.
        return MpInterval::from_rational(coeffs_[0], precision).to_double();
    }
    return eval_mp(precision).to_double();
}

ExactScalar ExactScalar::operator+(const ExactScalar& other) const {
    check_same_basis(other);
    std::vector<Rational> c(coeffs_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += other.coeffs_[i];
    return ExactScalar(basis_, std::move(c));
}

ExactScalar ExactScalar::operator-(const ExactScalar& other) const {
    check_same_basis(other);
    std::vector<Rational> c(coeffs_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= other.coeffs_[i];
    return ExactScalar(basis_, std::move(c));
}

ExactScalar ExactScalar::operator-() const {
    std::vector<Rational> c(coeffs_);
    for (auto& q : c) q = -q;
    return ExactScalar(basis_, std::move(c));
}

ExactScalar ExactScalar::operator*(const ExactScalar& other) const {
    check_same_basis(other);
    if (other.is_rational()) return scaled(other.coeffs_[0]);
    if (is_rational()) return other.scaled(coeffs_[0]);
    throw Error("product of two irrational scalars leaves the declared span");
}

ExactScalar ExactScalar::scaled(const Rational& q) const {
    std::vector<Rational> c(coeffs_);
    for (auto& x : c) x *= q;
    return ExactScalar(basis_, std::move(c));
}

bool ExactScalar::operator==(const ExactScalar& other) const {
    return coeffs_ == other.coeffs_;
}

void ExactScalar::check_same_basis(const ExactScalar& other) const {
    if (basis_ != other.basis_) throw Error("scalars over different constant bases");
}

std::string ExactScalar::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        const Rational& q = coeffs_[i];
        if (q == 0) continue;
        std::string term = format_rational(q < 0 ? Rational(-q) : q);
        if (i > 0) term += "*" + basis_->constant(i - 1).name;
        if (out.empty())
            out = (q < 0 ? "-" : "") + term;
        else
            out += (q < 0 ? "-" : "+") + term;
    }
    return out.empty() ? "0" : out;
}

ExactScalar ExactScalar::parse(const BasisPtr& basis, const std::string& text) {
    const BasisPtr& b = basis ? basis : ConstantBasis::empty();
    std::vector<Rational> coeffs(b->size() + 1, Rational(0));
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw ParseError("empty scalar expression");

    std::size_t pos = 0;
    while (pos < s.size()) {
        int sign = 1;
        while (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
            if (s[pos] == '-') sign = -sign;
            ++pos;
        }
        if (pos >= s.size()) throw ParseError("dangling sign in: " + text);
        std::size_t start = pos;
        while (pos < s.size() && s[pos] != '+' && s[pos] != '-') ++pos;
        std::string term = s.substr(start, pos - start);

        Rational q(1);
        std::string name;
        auto star = term.find('*');
        if (star != std::string::npos) {
            q = parse_rational(term.substr(0, star));
            name = term.substr(star + 1);
        } else if (!term.empty() &&
                   (std::isdigit(static_cast<unsigned char>(term[0])) || term[0] == '.')) {
            q = parse_rational(term);
        } else {
            name = term;
        }
        if (sign < 0) q = -q;
        if (name.empty()) {
            coeffs[0] += q;
        } else {
            int idx = b->index_of(name);
            if (idx < 0) throw ParseError("unknown constant '" + name + "' in: " + text);
            coeffs[static_cast<std::size_t>(idx) + 1] += q;
        }
    }
    return ExactScalar(b, std::move(coeffs));
}

namespace {

// Textbook floating-point LLL with delta = 0.99, enough for a heuristic probe.
void lll_reduce(std::vector<std::vector<double>>& b) {
    const std::size_t n = b.size();
    if (n == 0) return;
    const std::size_t dim = b[0].size();
    std::vector<std::vector<double>> bstar(n, std::vector<double>(dim, 0.0));
    std::vector<std::vector<double>> mu(n, std::vector<double>(n, 0.0));
    std::vector<double> norms(n, 0.0);

    auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0;
        for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
        return s;
    };
    auto gram_schmidt = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            bstar[i] = b[i];
            for (std::size_t j = 0; j < i; ++j) {
                mu[i][j] = norms[j] > 0 ? dot(b[i], bstar[j]) / norms[j] : 0.0;
                for (std::size_t k = 0; k < dim; ++k) bstar[i][k] -= mu[i][j] * bstar[j][k];
            }
            norms[i] = dot(bstar[i], bstar[i]);
        }
    };

    gram_schmidt();
    const double delta = 0.99;
    std::size_t k = 1;
    int iterations = 0;
    while (k < n && ++iterations < 10000) {
        for (std::size_t j = k; j-- > 0;) {
            double r = std::round(mu[k][j]);
            if (r != 0.0) {
                for (std::size_t t = 0; t < dim; ++t) b[k][t] -= r * b[j][t];
            }
        }
        gram_schmidt();
        if (norms[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1]) {
            ++k;
        } else {
            std::swap(b[k], b[k - 1]);
            gram_schmidt();
            if (k > 1) --k;
        }
    }
}

} // namespace

std::optional<std::vector<long>> find_integer_relation(const ConstantBasis& basis,
                                                       long coeff_bound) {
    const std::size_t k = basis.size();
    const std::size_t n = k + 1;
    const double scale = 1e12;

    std::vector<double> values(n);
    values[0] = 1.0;
    for (std::size_t i = 0; i < k; ++i) values[i + 1] = basis.value(i, 212).to_double().mid();

    std::vector<std::vector<double>> b(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        b[i][i] = 1.0;
        b[i][n] = scale * values[i];
    }
    lll_reduce(b);

    for (const auto& row : b) {
        bool in_bound = true;
        bool nonzero = false;
        std::vector<long> q(n);
        for (std::size_t i = 0; i < n; ++i) {
            double c = std::round(row[i]);
            if (std::fabs(c) > static_cast<double>(coeff_bound)) in_bound = false;
            q[i] = static_cast<long>(c);
            if (q[i] != 0) nonzero = true;
        }
        if (!nonzero || !in_bound) continue;
        if (std::fabs(row[n]) > 1e-2 * scale * 1e-9) continue;

        // Confirm at 300 bits before reporting.
        MpInterval acc = MpInterval::from_rational(Rational(q[0]), 300);
        for (std::size_t i = 0; i < k; ++i) {
            MpInterval term = basis.value(i, 300);
            term.mul_rational(Rational(q[i + 1]));
            acc.add(term);
        }
        Interval d = acc.to_double();
        if (d.mag() < 1e-30) return q;
    }
    return std::nullopt;
}

} // namespace dioph
