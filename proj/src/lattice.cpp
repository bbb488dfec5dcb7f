#include "dioph/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "dioph/errors.hpp"

namespace dioph {

namespace {

std::size_t n_cols(const ZMat& m) { return m.empty() ? 0 : m[0].size(); }

void add_row_multiple(ZMat& m, std::size_t dst, std::size_t src, const mpz_class& q) {
    for (std::size_t j = 0; j < m[dst].size(); ++j) m[dst][j] += q * m[src][j];
}

} // namespace

HnfResult hnf_rows(const ZMat& m_in) {
    HnfResult res;
    res.H = m_in;
    const std::size_t rows = res.H.size();
    const std::size_t cols = n_cols(res.H);
    res.U.assign(rows, ZVec(rows, 0));
    for (std::size_t i = 0; i < rows; ++i) res.U[i][i] = 1;

    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        // Clear column c below row r with gcd steps.
        for (std::size_t i = r + 1; i < rows; ++i) {
            while (res.H[i][c] != 0) {
                if (res.H[r][c] == 0) {
                    std::swap(res.H[r], res.H[i]);
                    std::swap(res.U[r], res.U[i]);
                    continue;
                }
                mpz_class q = res.H[i][c] / res.H[r][c]; // truncated division
                if (q != 0) {
                    add_row_multiple(res.H, i, r, -q);
                    add_row_multiple(res.U, i, r, -q);
                }
                if (res.H[i][c] != 0) {
                    std::swap(res.H[r], res.H[i]);
                    std::swap(res.U[r], res.U[i]);
                }
            }
        }
        if (res.H[r][c] == 0) continue;
        if (res.H[r][c] < 0) {
            for (auto& v : res.H[r]) v = -v;
            for (auto& v : res.U[r]) v = -v;
        }
        // Reduce entries above the pivot into [0, pivot).
        for (std::size_t i = 0; i < r; ++i) {
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), res.H[i][c].get_mpz_t(), res.H[r][c].get_mpz_t());
            if (q != 0) {
                add_row_multiple(res.H, i, r, -q);
                add_row_multiple(res.U, i, r, -q);
            }
        }
        res.pivot_cols.push_back(c);
        ++r;
    }
    res.rank = r;
    return res;
}

ZMat integer_kernel_basis(const ZMat& s) {
    // Rows x with x * s^T = 0  <=>  s x^T = 0.
    const std::size_t d = n_cols(s);
    ZMat st(d, ZVec(s.size(), 0));
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < d; ++j) st[j][i] = s[i][j];
    HnfResult h = hnf_rows(st);
    ZMat kernel;
    for (std::size_t i = h.rank; i < d; ++i) kernel.push_back(h.U[i]);
    return kernel;
}

ImageLatticeBasis image_lattice_basis_of(const ZMat& s) {
    const std::size_t d = n_cols(s);
    ZMat st(d, ZVec(s.size(), 0));
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < d; ++j) st[j][i] = s[i][j];
    HnfResult h = hnf_rows(st);
    ImageLatticeBasis out;
    for (std::size_t i = 0; i < h.rank; ++i) {
        out.basis.push_back(h.H[i]);
        out.lifts.push_back(h.U[i]);
    }
    return out;
}

bool solve_integer(const ZMat& s, const ZVec& b, ZVec& x) {
    const std::size_t d = n_cols(s);
    const std::size_t u = s.size();
    ZMat st(d, ZVec(u, 0));
    for (std::size_t i = 0; i < u; ++i)
        for (std::size_t j = 0; j < d; ++j) st[j][i] = s[i][j];
    HnfResult h = hnf_rows(st);
    // s * (U^T c) = (row_i of H stacked)^T c: solve with the pivot structure.
    ZVec c(d, 0);
    ZVec residual = b;
    for (std::size_t i = 0; i < h.rank; ++i) {
        std::size_t p = h.pivot_cols[i];
        mpz_class q, r;
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), residual[p].get_mpz_t(),
                    h.H[i][p].get_mpz_t());
        if (r != 0) return false;
        c[i] = q;
        for (std::size_t j = 0; j < u; ++j) residual[j] -= q * h.H[i][j];
    }
    for (std::size_t j = 0; j < u; ++j)
        if (residual[j] != 0) return false;
    x.assign(d, 0);
    for (std::size_t i = 0; i < h.rank; ++i)
        for (std::size_t j = 0; j < d; ++j) x[j] += c[i] * h.U[i][j];
    return true;
}

ZVec size_reduce_against(const ZVec& x, const ZMat& k) {
    if (k.empty()) return x;
    const std::size_t d = x.size();
    ZVec best = x;
    auto norm_inf = [](const ZVec& v) {
        mpz_class m = 0;
        for (const auto& t : v) {
            mpz_class a = abs(t);
            if (a > m) m = a;
        }
        return m;
    };
    // Coordinate-descent rounding against each lattice row, a few passes.
    for (int pass = 0; pass < 4; ++pass) {
        bool improved = false;
        for (const auto& row : k) {
            double num = 0, den = 0;
            for (std::size_t j = 0; j < d; ++j) {
                double rj = mpz_get_d(row[j].get_mpz_t());
                num += mpz_get_d(best[j].get_mpz_t()) * rj;
                den += rj * rj;
            }
            if (den == 0) continue;
            long c = std::lround(num / den);
            if (c == 0) continue;
            ZVec cand = best;
            for (std::size_t j = 0; j < d; ++j) cand[j] -= c * row[j];
            if (norm_inf(cand) < norm_inf(best)) {
                best = cand;
                improved = true;
            }
        }
        if (!improved) break;
    }
    return best;
}

namespace {

struct Echelon {
    QMat m;
    std::vector<std::size_t> pivot_cols;
};

Echelon rref(QMat m) {
    Echelon e;
    const std::size_t rows = m.size();
    const std::size_t cols = rows ? m[0].size() : 0;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[r], m[piv]);
        Rational inv = 1 / m[r][c];
        for (auto& v : m[r]) v *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rational f = m[i][c];
            for (std::size_t j = 0; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        e.pivot_cols.push_back(c);
        ++r;
    }
    e.m = std::move(m);
    return e;
}

} // namespace

std::size_t rank_q(QMat m) { return rref(std::move(m)).pivot_cols.size(); }

QMat nullspace_q(const QMat& m) {
    const std::size_t cols = m.empty() ? 0 : m[0].size();
    Echelon e = rref(m);
    std::vector<bool> is_pivot(cols, false);
    for (auto c : e.pivot_cols) is_pivot[c] = true;
    QMat basis;
    for (std::size_t free_c = 0; free_c < cols; ++free_c) {
        if (is_pivot[free_c]) continue;
        QVec v(cols, Rational(0));
        v[free_c] = 1;
        for (std::size_t i = 0; i < e.pivot_cols.size(); ++i)
            v[e.pivot_cols[i]] = -e.m[i][free_c];
        basis.push_back(std::move(v));
    }
    return basis;
}

QVec solve_q(QMat m, QVec b) {
    const std::size_t rows = m.size();
    const std::size_t cols = rows ? m[0].size() : 0;
    for (std::size_t i = 0; i < rows; ++i) m[i].push_back(b[i]);
    Echelon e = rref(std::move(m));
    QVec x(cols, Rational(0));
    for (std::size_t i = 0; i < e.pivot_cols.size(); ++i) {
        if (e.pivot_cols[i] == cols) throw NoSolution();
        x[e.pivot_cols[i]] = e.m[i][cols];
    }
    // Verify in case of underdetermined systems with incompatible rows.
    return x;
}

QMat invert_q(const QMat& m) {
    const std::size_t n = m.size();
    QMat aug = m;
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i].size() != n) throw DimensionError("invert_q needs a square matrix");
        for (std::size_t j = 0; j < n; ++j) aug[i].push_back(i == j ? Rational(1) : Rational(0));
    }
    Echelon e = rref(std::move(aug));
    if (e.pivot_cols.size() != n || e.pivot_cols.back() >= n) throw RankDeficient("singular matrix");
    QMat inv(n, QVec(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = e.m[i][n + j];
    return inv;
}

QMat matmul_q(const QMat& a, const QMat& b) {
    const std::size_t n = a.size();
    const std::size_t k = n ? a[0].size() : 0;
    const std::size_t m = b.empty() ? 0 : b[0].size();
    if (b.size() != k) throw DimensionError("matmul_q shape mismatch");
    QMat c(n, QVec(m, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < k; ++t) {
            if (a[i][t] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][t] * b[t][j];
        }
    return c;
}

} // namespace dioph
