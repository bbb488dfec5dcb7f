#include "dioph/normal_form.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>

#include "dioph/errors.hpp"

namespace dioph {

namespace {

constexpr double kZeroTol = 1e-9;

Eigen::MatrixXd rows_matrix(const FormSystem& psi, const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd m(rows.size(), psi.n_vars);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < psi.n_vars; ++c) m(r, c) = psi.forms[rows[r]][c];
    return m;
}

// Enumerates set partitions of `items` via restricted growth strings.
void for_each_partition(const std::vector<std::size_t>& items,
                        const std::function<void(const Partition&)>& fn) {
    const std::size_t n = items.size();
    if (n == 0) {
        Partition empty;
        fn(empty);
        return;
    }
    std::vector<std::size_t> label(n, 0);
    std::vector<std::size_t> max_label(n, 0);
    while (true) {
        std::size_t parts = *std::max_element(label.begin(), label.end()) + 1;
        Partition p(parts);
        for (std::size_t t = 0; t < n; ++t) p[label[t]].push_back(items[t]);
        fn(p);

        // Next restricted growth string.
        std::size_t t = n;
        bool done = true;
        while (t-- > 1) {
            if (label[t] <= max_label[t - 1]) {
                ++label[t];
                max_label[t] = std::max(max_label[t - 1] + 1, label[t]);
                for (std::size_t k = t + 1; k < n; ++k) {
                    label[k] = 0;
                    max_label[k] = max_label[t];
                }
                done = false;
                break;
            }
        }
        if (done) break;
    }
}

} // namespace

FormSystem FormSystem::from_rows(std::vector<std::vector<double>> rows) {
    FormSystem psi;
    if (rows.empty()) throw DimensionError("empty form system");
    psi.n_vars = rows[0].size();
    for (const auto& r : rows) {
        if (r.size() != psi.n_vars) throw DimensionError("ragged form system");
        bool zero = true;
        for (double v : r)
            if (std::fabs(v) > kZeroTol) zero = false;
        if (zero) throw Error("zero form row");
    }
    psi.forms = std::move(rows);
    return psi;
}

double partition_residual(const FormSystem& psi, std::size_t i,
                          const std::vector<std::size_t>& part) {
    Eigen::VectorXd target(psi.n_vars);
    for (std::size_t c = 0; c < psi.n_vars; ++c) target(c) = psi.forms[i][c];
    if (part.empty()) return target.norm();
    Eigen::MatrixXd a = rows_matrix(psi, part).transpose(); // n x |part|
    Eigen::VectorXd coeff = a.colPivHouseholderQr().solve(target);
    return (target - a * coeff).norm();
}

ComplexityReport cs_complexity(const FormSystem& psi, double margin_floor) {
    const std::size_t m = psi.n_forms();
    if (m < 3) throw DimensionError("complexity queries need m >= 3");

    ComplexityReport rep;
    rep.s_i.assign(m, kInfiniteComplexity);
    rep.best_partition.assign(m, Partition{});

    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::size_t> others;
        for (std::size_t j = 0; j < m; ++j)
            if (j != i) others.push_back(j);

        auto suitable = [&](const Partition& p) {
            for (const auto& part : p)
                if (partition_residual(psi, i, part) < margin_floor) return false;
            return true;
        };

        // The all-singletons partition has maximal margins; if it fails, every
        // partition fails and s_i is infinite.
        Partition singletons;
        for (auto j : others) singletons.push_back({j});
        if (!suitable(singletons)) continue;

        if (others.size() <= 7) {
            std::size_t best = others.size();
            Partition best_p = singletons;
            for_each_partition(others, [&](const Partition& p) {
                if (p.size() < best && suitable(p)) {
                    best = p.size();
                    best_p = p;
                }
            });
            rep.s_i[i] = best - 1;
            rep.best_partition[i] = best_p;
        } else {
            // Greedy pair merging, not guaranteed minimal.
            rep.exhaustive = false;
            Partition current = singletons;
            bool merged = true;
            while (merged) {
                merged = false;
                for (std::size_t a = 0; a < current.size() && !merged; ++a)
                    for (std::size_t b = a + 1; b < current.size() && !merged; ++b) {
                        std::vector<std::size_t> unioned = current[a];
                        unioned.insert(unioned.end(), current[b].begin(), current[b].end());
                        if (partition_residual(psi, i, unioned) >= margin_floor) {
                            Partition next;
                            for (std::size_t t = 0; t < current.size(); ++t)
                                if (t != a && t != b) next.push_back(current[t]);
                            next.push_back(std::move(unioned));
                            current = std::move(next);
                            merged = true;
                        }
                    }
            }
            rep.s_i[i] = current.size() - 1;
            rep.best_partition[i] = current;
        }
    }

    std::size_t worst = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (rep.s_i[i] == kInfiniteComplexity) return rep; // s stays infinite
        worst = std::max(worst, rep.s_i[i]);
    }
    rep.s = std::max<std::size_t>(1, worst);
    return rep;
}

NormalFormWitness is_normal_form(const FormSystem& psi, std::size_t i,
                                 std::optional<std::vector<std::size_t>> restrict_cols) {
    std::vector<std::size_t> cols;
    if (restrict_cols) {
        cols = *restrict_cols;
    } else {
        if (psi.n_vars > 24) throw BudgetExceeded("witness search needs a restriction hint");
        for (std::size_t c = 0; c < psi.n_vars; ++c) cols.push_back(c);
    }
    // Only coordinates where psi_i is nonzero can appear in a witness.
    std::vector<std::size_t> support;
    for (auto c : cols)
        if (std::fabs(psi.forms[i][c]) > kZeroTol) support.push_back(c);

    const std::size_t k = support.size();
    if (k > 24) throw BudgetExceeded("witness search space too large");

    NormalFormWitness best;
    std::size_t best_size = k + 1;
    for (std::size_t mask = 1; mask < (1ULL << k); ++mask) {
        std::size_t size = static_cast<std::size_t>(__builtin_popcountll(mask));
        if (size >= best_size) continue;
        bool ok = true;
        for (std::size_t ip = 0; ip < psi.n_forms() && ok; ++ip) {
            if (ip == i) continue;
            bool vanishes = false;
            for (std::size_t t = 0; t < k && !vanishes; ++t)
                if ((mask & (1ULL << t)) && std::fabs(psi.forms[ip][support[t]]) <= kZeroTol)
                    vanishes = true;
            ok = vanishes;
        }
        if (ok) {
            best.is_normal = true;
            best.witness.clear();
            for (std::size_t t = 0; t < k; ++t)
                if (mask & (1ULL << t)) best.witness.push_back(support[t]);
            best_size = size;
        }
    }
    return best;
}

namespace {

// Minimum-infinity-norm solution of psi_i(f) = 1, psi_j(f) = 0 for j in part,
// over basic solutions; least-squares fallback past the pivot budget.
std::vector<double> solve_shift(const FormSystem& psi, std::size_t i,
                                const std::vector<std::size_t>& part, bool& budget_exceeded) {
    const std::size_t n = psi.n_vars;
    std::vector<std::size_t> rows = {i};
    rows.insert(rows.end(), part.begin(), part.end());
    Eigen::MatrixXd a = rows_matrix(psi, rows);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows.size());
    b(0) = 1.0;

    // Keep an independent row subset (psi_i first; dependent rows are
    // consistent by suitability).
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    const std::size_t r = static_cast<std::size_t>(lu.rank());

    auto check_full = [&](const Eigen::VectorXd& f) {
        Eigen::VectorXd res = a * f - b;
        return res.lpNorm<Eigen::Infinity>() <= 1e-7;
    };

    std::vector<std::size_t> col_idx(n);
    for (std::size_t c = 0; c < n; ++c) col_idx[c] = c;

    double best_norm = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best;
    std::size_t tried = 0;
    std::vector<std::size_t> pick(r);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t level, std::size_t start) {
        if (tried > 2000) return;
        if (level == r) {
            ++tried;
            Eigen::MatrixXd sub(rows.size(), r);
            for (std::size_t t = 0; t < r; ++t) sub.col(t) = a.col(pick[t]);
            Eigen::VectorXd x = sub.colPivHouseholderQr().solve(b);
            Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
            for (std::size_t t = 0; t < r; ++t) f(pick[t]) = x(t);
            if (!check_full(f)) return;
            double norm = f.lpNorm<Eigen::Infinity>();
            if (norm < best_norm) {
                best_norm = norm;
                best = f;
            }
            return;
        }
        for (std::size_t c = start; c < n; ++c) {
            pick[level] = c;
            rec(level + 1, c + 1);
        }
    };
    rec(0, 0);
    if (tried > 2000) budget_exceeded = true;

    if (!std::isfinite(best_norm)) {
        // Least-squares-then-verify fallback.
        budget_exceeded = true;
        Eigen::VectorXd f = a.colPivHouseholderQr().solve(b);
        if (!check_full(f)) throw NoSolution("part system inconsistent despite suitability");
        best = f;
    }
    std::vector<double> out(n);
    for (std::size_t c = 0; c < n; ++c) out[c] = best(c);
    return out;
}

} // namespace

NormalFormExtension extend_normal_form(const FormSystem& psi, std::size_t i,
                                       const Partition& partition) {
    NormalFormExtension ext;
    ext.target_index = i;
    ext.partition = partition;
    ext.s = partition.empty() ? 0 : partition.size() - 1;

    for (const auto& part : partition) {
        double margin = partition_residual(psi, i, part);
        if (margin <= 0.0) throw Error("partition is not suitable for the target form");
        ext.margins.push_back(margin);
    }

    for (const auto& part : partition)
        ext.shift_vectors.push_back(solve_shift(psi, i, part, ext.pivot_budget_exceeded));

    // Extended matrix [Psi | Psi f_1 ... Psi f_{s+1}].
    const std::size_t m = psi.n_forms();
    const std::size_t n = psi.n_vars;
    const std::size_t s1 = partition.size();
    std::vector<std::vector<double>> rows(m, std::vector<double>(n + s1, 0.0));
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) rows[r][c] = psi.forms[r][c];
        for (std::size_t kk = 0; kk < s1; ++kk) {
            double v = 0.0;
            for (std::size_t c = 0; c < n; ++c) v += psi.forms[r][c] * ext.shift_vectors[kk][c];
            // Snap construction zeros / ones onto exact values.
            if (std::fabs(v) < 1e-9) v = 0.0;
            if (std::fabs(v - 1.0) < 1e-9 && r == i) v = 1.0;
            rows[r][n + kk] = v;
        }
    }
    ext.extended = FormSystem::from_rows(std::move(rows));

    std::vector<std::size_t> appended;
    for (std::size_t kk = 0; kk < s1; ++kk) appended.push_back(n + kk);
    ext.witness = is_normal_form(ext.extended, i, appended);
    if (!ext.witness.is_normal)
        throw Error("extension failed the normal form predicate");
    return ext;
}

} // namespace dioph
