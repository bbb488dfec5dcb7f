#include "dioph/linear_system.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "dioph/errors.hpp"
#include "dioph/formal.hpp"

namespace dioph {

namespace {

Eigen::MatrixXd midpoints(const LinearSystem& sys) {
    const auto& iv = sys.entry_intervals();
    Eigen::MatrixXd m(sys.m(), sys.d());
    for (std::size_t i = 0; i < sys.m(); ++i)
        for (std::size_t j = 0; j < sys.d(); ++j) m(i, j) = iv[i][j].mid();
    return m;
}

double sigma_min(const Eigen::MatrixXd& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(std::min(m.rows(), m.cols()) - 1);
}

// All size-k subsets of {0..n-1}, in lexicographic order.
void for_each_subset(std::size_t n, std::size_t k,
                     const std::function<void(const std::vector<std::size_t>&)>& fn) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    if (k == 0) {
        fn(idx);
        return;
    }
    while (true) {
        fn(idx);
        std::size_t i = k;
        while (i > 0) {
            --i;
            if (idx[i] != i + n - k) break;
            if (i == 0) return;
        }
        ++idx[i];
        for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

unsigned long long binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    unsigned long long r = 1;
    for (std::size_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

FormalPoly minor_det(const LinearSystem& sys, const std::vector<std::size_t>& rows,
                     const std::vector<std::size_t>& cols) {
    std::vector<std::vector<ExactScalar>> sub;
    sub.reserve(rows.size());
    for (auto i : rows) {
        std::vector<ExactScalar> r;
        r.reserve(cols.size());
        for (auto j : cols) r.push_back(sys.entry(i, j));
        sub.push_back(std::move(r));
    }
    return formal_det(sub);
}

} // namespace

LinearSystem::LinearSystem(BasisPtr basis, std::vector<std::vector<ExactScalar>> rows)
    : basis_(std::move(basis)), rows_(std::move(rows)) {
    if (rows_.empty()) throw DimensionError("empty system");
    const std::size_t d = rows_[0].size();
    for (const auto& r : rows_)
        if (r.size() != d) throw DimensionError("ragged system rows");
    if (d < rows_.size() + 1) throw DimensionError("need d >= m+1");
    for (const auto& r : rows_)
        for (const auto& e : r)
            if (e.basis() != basis_) throw Error("system entries over mixed bases");
}

LinearSystem::LinearSystem(const LinearSystem& other) : basis_(other.basis_) {
    std::lock_guard<std::mutex> lock(other.cache_mutex_);
    rows_ = other.rows_;
    intervals_ = other.intervals_;
    report_ = other.report_;
}

LinearSystem::LinearSystem(LinearSystem&& other) noexcept
    : basis_(std::move(other.basis_)), rows_(std::move(other.rows_)),
      intervals_(std::move(other.intervals_)), report_(std::move(other.report_)) {}

LinearSystem& LinearSystem::operator=(const LinearSystem& other) {
    if (this != &other) {
        std::scoped_lock lock(cache_mutex_, other.cache_mutex_);
        basis_ = other.basis_;
        rows_ = other.rows_;
        intervals_ = other.intervals_;
        report_ = other.report_;
    }
    return *this;
}

LinearSystem& LinearSystem::operator=(LinearSystem&& other) noexcept {
    if (this != &other) {
        basis_ = std::move(other.basis_);
        rows_ = std::move(other.rows_);
        intervals_ = std::move(other.intervals_);
        report_ = std::move(other.report_);
    }
    return *this;
}

LinearSystem LinearSystem::parse_rows(const BasisPtr& basis,
                                      const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::vector<ExactScalar>> parsed;
    parsed.reserve(rows.size());
    for (const auto& r : rows) {
        std::vector<ExactScalar> row;
        row.reserve(r.size());
        for (const auto& s : r) row.push_back(ExactScalar::parse(basis, s));
        parsed.push_back(std::move(row));
    }
    return LinearSystem(basis ? basis : ConstantBasis::empty(), std::move(parsed));
}

const std::vector<std::vector<Interval>>& LinearSystem::entry_intervals() const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (!intervals_) {
        std::vector<std::vector<Interval>> iv(m(), std::vector<Interval>(d()));
        for (std::size_t i = 0; i < m(); ++i)
            for (std::size_t j = 0; j < d(); ++j) iv[i][j] = rows_[i][j].eval(106);
        intervals_ = std::move(iv);
    }
    return *intervals_;
}

double LinearSystem::norm_inf_upper() const {
    const auto& iv = entry_intervals();
    double r = 0.0;
    for (const auto& row : iv)
        for (const auto& e : row) r = std::max(r, e.mag());
    return r;
}

RankMatrixInfo rank_matrix(const LinearSystem& sys, std::optional<std::size_t> exclude_column) {
    const std::size_t m = sys.m();
    const std::size_t d = sys.d();
    std::vector<std::size_t> all_rows(m);
    for (std::size_t i = 0; i < m; ++i) all_rows[i] = i;

    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < d; ++j)
        if (!exclude_column || j != *exclude_column) cols.push_back(j);
    if (cols.size() < m) throw DimensionError("not enough columns for a rank matrix");

    RankMatrixInfo best;
    bool found = false;
    double best_abs = 0.0;

    auto consider = [&](const std::vector<std::size_t>& pick) {
        FormalPoly det = minor_det(sys, all_rows, pick);
        if (det.is_zero()) return;
        Interval v = certified_value(det); // throws AmbiguousValue if undecidable
        double a = std::fabs(v.mid());
        if (!found || a > best_abs) {
            found = true;
            best_abs = a;
            best.columns = pick;
            best.det = v.mid();
        }
    };

    if (binomial(cols.size(), m) <= 2000) {
        for_each_subset(cols.size(), m, [&](const std::vector<std::size_t>& idx) {
            std::vector<std::size_t> pick(m);
            for (std::size_t t = 0; t < m; ++t) pick[t] = cols[idx[t]];
            consider(pick);
        });
        best.exhaustive = true;
    } else {
        // Greedy column-pivoted elimination on the midpoint matrix.
        Eigen::MatrixXd a = midpoints(sys);
        std::vector<std::size_t> remaining = cols;
        std::vector<std::size_t> pick;
        Eigen::MatrixXd work = a;
        std::vector<bool> used_row(m, false);
        for (std::size_t step = 0; step < m; ++step) {
            double bestv = -1.0;
            std::size_t bj = 0, bi = 0;
            for (std::size_t j : remaining) {
                for (std::size_t i = 0; i < m; ++i) {
                    if (used_row[i]) continue;
                    double v = std::fabs(work(i, j));
                    if (v > bestv) {
                        bestv = v;
                        bj = j;
                        bi = i;
                    }
                }
            }
            if (bestv <= 0) break;
            pick.push_back(bj);
            used_row[bi] = true;
            remaining.erase(std::find(remaining.begin(), remaining.end(), bj));
            for (std::size_t i = 0; i < m; ++i) {
                if (used_row[i]) continue;
                double f = work(i, bj) / work(bi, bj);
                for (std::size_t j = 0; j < d; ++j) work(i, j) -= f * work(bi, j);
            }
        }
        std::sort(pick.begin(), pick.end());
        if (pick.size() == m) consider(pick);
        best.exhaustive = false;
    }

    if (!found) {
        throw RankDeficient(exclude_column
                                ? "no rank matrix avoiding the excluded column (global rank variety)"
                                : "no nonzero m-by-m minor (rank variety)");
    }

    Eigen::MatrixXd a = midpoints(sys);
    Eigen::MatrixXd sub(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t t = 0; t < m; ++t) sub(i, t) = a(i, best.columns[t]);
    Eigen::MatrixXd inv = sub.inverse();
    best.inverse_norm = inv.cwiseAbs().rowwise().sum().maxCoeff();
    return best;
}

double dual_degeneracy_margin(const LinearSystem& sys) {
    const std::size_t m = sys.m();
    const std::size_t d = sys.d();
    if (d < m + 2) throw DimensionError("dual degeneracy needs d >= m+2");

    std::vector<std::size_t> all_rows(m);
    for (std::size_t i = 0; i < m; ++i) all_rows[i] = i;
    Eigen::MatrixXd a = midpoints(sys);

    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            std::vector<std::size_t> keep;
            for (std::size_t c = 0; c < d; ++c)
                if (c != i && c != j) keep.push_back(c);

            // Exact rank test of the deleted matrix: all m-minors formally zero
            // (or certified zero) means the margin is exactly 0.
            bool all_zero = true;
            for_each_subset(keep.size(), m, [&](const std::vector<std::size_t>& idx) {
                if (!all_zero) return;
                std::vector<std::size_t> pick(m);
                for (std::size_t t = 0; t < m; ++t) pick[t] = keep[idx[t]];
                FormalPoly det = minor_det(sys, all_rows, pick);
                if (!det.is_zero() && certified_sign(det) != 0) all_zero = false;
            });
            if (all_zero) return 0.0;

            Eigen::MatrixXd sub(m, keep.size());
            for (std::size_t r = 0; r < m; ++r)
                for (std::size_t t = 0; t < keep.size(); ++t) sub(r, t) = a(r, keep[t]);
            margin = std::min(margin, sigma_min(sub));
        }
    }
    return margin;
}

RationalStructure rational_structure(const LinearSystem& sys) {
    const std::size_t m = sys.m();
    const std::size_t d = sys.d();
    const std::size_t k = sys.basis()->size();

    // Constraints theta . (slice_i of L) = 0 for every irrational slice.
    QMat constraints;
    for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t j = 0; j < d; ++j) {
            QVec row(m);
            bool nonzero = false;
            for (std::size_t i = 0; i < m; ++i) {
                row[i] = sys.entry(i, j).coeff_of(s);
                if (row[i] != 0) nonzero = true;
            }
            if (nonzero) constraints.push_back(std::move(row));
        }
    }

    RationalStructure rs;
    QMat w = constraints.empty() ? QMat{} : nullspace_q(constraints);
    if (constraints.empty()) {
        // Integer-free constraint set: every theta works, u = m, Theta = identity scaled.
        w.assign(m, QVec(m, Rational(0)));
        for (std::size_t i = 0; i < m; ++i) w[i][i] = 1;
    }
    rs.u = w.size();
    rs.complexity = Rational(0);
    if (rs.u == 0) return rs;

    // Scale each basis row minimally so theta . L0 is integral.
    for (auto& theta : w) {
        QVec image(d, Rational(0));
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t i = 0; i < m; ++i) image[j] += theta[i] * sys.entry(i, j).rational_part();
        Rational t = minimal_integer_scale(image);
        for (auto& v : theta) v *= t;
        for (auto& v : theta) {
            Rational a = v < 0 ? Rational(-v) : v;
            if (a > rs.complexity) rs.complexity = a;
        }
    }
    rs.theta = std::move(w);
    return rs;
}

const ClassificationReport& LinearSystem::classify() const {
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        if (report_) return *report_;
    }
    ClassificationReport rep;
    rep.rank_matrix = rank_matrix(*this); // throws RankDeficient when rank < m
    rep.rank = m();

    Eigen::MatrixXd a = midpoints(*this);
    rep.rank_margin = sigma_min(a);
    rep.global_rank_margin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < d(); ++j) {
        Eigen::MatrixXd sub(m(), d() - 1);
        std::size_t t = 0;
        for (std::size_t c = 0; c < d(); ++c) {
            if (c == j) continue;
            for (std::size_t i = 0; i < m(); ++i) sub(i, t) = a(i, c);
            ++t;
        }
        rep.global_rank_margin = std::min(rep.global_rank_margin, sigma_min(sub));
    }
    if (d() >= m() + 2) {
        rep.dual_degeneracy_margin = dual_degeneracy_margin(*this);
        rep.in_dual_degeneracy_variety = rep.dual_degeneracy_margin == 0.0;
    }
    rep.rational = rational_structure(*this);

    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (!report_) report_ = std::move(rep);
    return *report_;
}

} // namespace dioph
