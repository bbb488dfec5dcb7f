#include "dioph/reduction.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "dioph/errors.hpp"

namespace dioph {

namespace {

// Scales a rational vector to a primitive integer vector.
ZVec primitive_integer(const QVec& v) {
    Rational t = minimal_integer_scale(v);
    ZVec out(v.size());
    mpz_class g = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        Rational s = v[i] * t;
        if (!is_integer(s)) throw Error("primitive scaling failed");
        out[i] = s.get_num();
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out[i].get_mpz_t());
    }
    if (g > 1)
        for (auto& x : out) x /= g;
    return out;
}

std::vector<ExactScalar> times_integer_vector(const LinearSystem& sys, const ZVec& x) {
    std::vector<ExactScalar> out;
    out.reserve(sys.m());
    for (std::size_t i = 0; i < sys.m(); ++i) {
        ExactScalar acc = ExactScalar::from_rational(sys.basis(), Rational(0));
        for (std::size_t j = 0; j < sys.d(); ++j) {
            if (x[j] == 0) continue;
            acc = acc + sys.entry(i, j).scaled(Rational(x[j]));
        }
        out.push_back(std::move(acc));
    }
    return out;
}

} // namespace

ImageLatticeBasis image_lattice_basis(const ZMat& s) {
    QMat q(s.size(), QVec(s.empty() ? 0 : s[0].size()));
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s[i].size(); ++j) q[i][j] = Rational(s[i][j]);
    if (rank_q(q) != s.size()) throw NotSurjective("image lattice needs a surjective map");

    ImageLatticeBasis b = image_lattice_basis_of(s);
    ZMat kernel = integer_kernel_basis(s);
    for (auto& lift : b.lifts) lift = size_reduce_against(lift, kernel);
    return b;
}

ReductionBundle reduce(const LinearSystem& sys, double eps) {
    return reduce(sys, std::vector<double>(sys.m(), eps));
}

ReductionBundle reduce(const LinearSystem& sys, const std::vector<double>& eps) {
    const std::size_t m = sys.m();
    const std::size_t d = sys.d();
    if (eps.size() != m) throw DimensionError("eps size must match row count");

    RationalStructure rs = rational_structure(sys);
    ReductionBundle bundle;
    bundle.u = rs.u;
    bundle.theta = rs.theta;
    bundle.eps = eps;

    if (rs.u == m) throw UseRationalPath();

    if (rs.u == 0) {
        bundle.xi.assign(d, ZVec(d, 0));
        for (std::size_t j = 0; j < d; ++j) bundle.xi[j][j] = 1;
        bundle.shifts.push_back(ZVec(d, 0));
        bundle.p_matrix.assign(m, std::vector<ExactScalar>(m));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                bundle.p_matrix[i][j] =
                    ExactScalar::from_rational(sys.basis(), Rational(i == j ? 1 : 0));
        bundle.l_prime = std::make_shared<LinearSystem>(sys.basis(), sys.rows());
        bundle.shift_support.push_back(eps);
        for (auto& s : bundle.shift_support[0]) s += 1.0;
        bundle.dual_pair_margin = kernel_parametrization_check(bundle.xi, *bundle.l_prime);
        return bundle;
    }

    const std::size_t u = rs.u;

    // S = Theta L0, an integer u x d matrix with Theta L = S exactly.
    ZMat s_mat(u, ZVec(d));
    for (std::size_t i = 0; i < u; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            Rational v(0);
            for (std::size_t k = 0; k < m; ++k)
                v += rs.theta[i][k] * sys.entry(k, j).rational_part();
            if (!is_integer(v)) throw Error("rational map is not integrally scaled");
            s_mat[i][j] = v.get_num();
        }

    // Xi: saturated kernel basis of S, as columns of a d x h matrix.
    ZMat kernel_rows = integer_kernel_basis(s_mat);
    const std::size_t h = kernel_rows.size();
    if (h != d - u) throw Error("kernel dimension mismatch");
    bundle.xi.assign(d, ZVec(h, 0));
    for (std::size_t t = 0; t < h; ++t)
        for (std::size_t j = 0; j < d; ++j) bundle.xi[j][t] = kernel_rows[t][j];

    // Image lattice basis and small lifts.
    ImageLatticeBasis lat = image_lattice_basis(s_mat);
    bundle.lattice_basis_a = lat.basis;
    bundle.lifts_x = lat.lifts;

    // A = (columns a_i)^{-1}; the top block of P is A Theta.
    QMat ma(u, QVec(u));
    for (std::size_t k = 0; k < u; ++k)
        for (std::size_t i = 0; i < u; ++i) ma[k][i] = Rational(lat.basis[i][k]);
    QMat a_inv = invert_q(ma);
    QMat atheta = matmul_q(a_inv, rs.theta); // u x m

    // Integer basis Y of ker Theta (columns y_j).
    QMat ker_theta = nullspace_q(rs.theta); // (m-u) rows of length m
    std::vector<ZVec> y_cols;
    for (const auto& row : ker_theta) y_cols.push_back(primitive_integer(row));

    // Row subset I with Y_I invertible.
    QMat y_as_rows(m, QVec(m - u));
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m - u; ++c) y_as_rows[r][c] = Rational(y_cols[c][r]);
    std::vector<std::size_t> rows_i;
    {
        QMat acc;
        for (std::size_t r = 0; r < m && rows_i.size() < m - u; ++r) {
            acc.push_back(y_as_rows[r]);
            if (rank_q(acc) == acc.size())
                rows_i.push_back(r);
            else
                acc.pop_back();
        }
        if (rows_i.size() != m - u) throw Error("kernel basis of Theta is rank deficient");
    }
    QMat y_i(m - u, QVec(m - u));
    for (std::size_t r = 0; r < m - u; ++r) y_i[r] = y_as_rows[rows_i[r]];
    QMat y_i_inv = invert_q(y_i);

    // Lx columns, exact.
    std::vector<std::vector<ExactScalar>> lx_cols;
    for (std::size_t i = 0; i < u; ++i) lx_cols.push_back(times_integer_vector(sys, lat.lifts[i]));

    // E = I - Lx (A Theta), exact in the scalar ring.
    std::vector<std::vector<ExactScalar>> e_mat(m, std::vector<ExactScalar>(m));
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c) {
            ExactScalar acc = ExactScalar::from_rational(sys.basis(),
                                                         Rational(r == c ? 1 : 0));
            for (std::size_t i = 0; i < u; ++i)
                acc = acc - lx_cols[i][r].scaled(atheta[i][c]);
            e_mat[r][c] = std::move(acc);
        }

    // P: top rows A Theta (rational), bottom rows Y_I^{-1} E_I.
    bundle.p_matrix.assign(m, std::vector<ExactScalar>(m));
    for (std::size_t r = 0; r < u; ++r)
        for (std::size_t c = 0; c < m; ++c)
            bundle.p_matrix[r][c] = ExactScalar::from_rational(sys.basis(), atheta[r][c]);
    for (std::size_t r = 0; r < m - u; ++r)
        for (std::size_t c = 0; c < m; ++c) {
            ExactScalar acc = ExactScalar::from_rational(sys.basis(), Rational(0));
            for (std::size_t t = 0; t < m - u; ++t)
                acc = acc + e_mat[rows_i[t]][c].scaled(y_i_inv[r][t]);
            bundle.p_matrix[u + r][c] = std::move(acc);
        }

    // Exact verification on basis vectors. A Theta (L x_i) = e_i pins the top
    // block and, through E = I - Lx A Theta, forces P_bot (L x_i) = 0; P y_j is
    // checked directly since y_j is rational.
    for (std::size_t i = 0; i < u; ++i)
        for (std::size_t r = 0; r < u; ++r) {
            ExactScalar acc = ExactScalar::from_rational(sys.basis(), Rational(0));
            for (std::size_t c = 0; c < m; ++c)
                acc = acc + lx_cols[i][c].scaled(atheta[r][c]);
            ExactScalar expect =
                ExactScalar::from_rational(sys.basis(), Rational(r == i ? 1 : 0));
            if (!(acc == expect)) throw Error("P top block failed exact verification");
        }
    for (std::size_t j = 0; j < m - u; ++j)
        for (std::size_t r = 0; r < m; ++r) {
            ExactScalar acc = ExactScalar::from_rational(sys.basis(), Rational(0));
            for (std::size_t c = 0; c < m; ++c)
                acc = acc + bundle.p_matrix[r][c].scaled(Rational(y_cols[j][c]));
            ExactScalar expect =
                ExactScalar::from_rational(sys.basis(), Rational(r == u + j ? 1 : 0));
            if (!(acc == expect)) throw Error("P kernel block failed exact verification");
        }

    // L Xi, exact; and Theta (L Xi) = 0 exactly.
    std::vector<std::vector<ExactScalar>> lxi(m, std::vector<ExactScalar>(h));
    for (std::size_t t = 0; t < h; ++t) {
        ZVec col(d);
        for (std::size_t j = 0; j < d; ++j) col[j] = bundle.xi[j][t];
        std::vector<ExactScalar> lcol = times_integer_vector(sys, col);
        for (std::size_t r = 0; r < m; ++r) lxi[r][t] = lcol[r];
    }
    for (std::size_t i = 0; i < u; ++i)
        for (std::size_t t = 0; t < h; ++t) {
            ExactScalar acc = ExactScalar::from_rational(sys.basis(), Rational(0));
            for (std::size_t r = 0; r < m; ++r) acc = acc + lxi[r][t].scaled(rs.theta[i][r]);
            if (!acc.is_zero()) throw Error("Theta L Xi != 0");
        }

    // L' = Y_I^{-1} (L Xi)_I; verify Y L' = L Xi exactly.
    std::vector<std::vector<ExactScalar>> lp(m - u, std::vector<ExactScalar>(h));
    for (std::size_t r = 0; r < m - u; ++r)
        for (std::size_t t = 0; t < h; ++t) {
            ExactScalar acc = ExactScalar::from_rational(sys.basis(), Rational(0));
            for (std::size_t c = 0; c < m - u; ++c)
                acc = acc + lxi[rows_i[c]][t].scaled(y_i_inv[r][c]);
            lp[r][t] = std::move(acc);
        }
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t t = 0; t < h; ++t) {
            ExactScalar acc = ExactScalar::from_rational(sys.basis(), Rational(0));
            for (std::size_t c = 0; c < m - u; ++c)
                acc = acc + lp[c][t].scaled(Rational(y_cols[c][r]));
            if (!(acc == lxi[r][t])) throw Error("Y L' != L Xi");
        }
    bundle.l_prime = std::make_shared<LinearSystem>(sys.basis(), std::move(lp));

    if (rational_structure(*bundle.l_prime).u != 0)
        throw Error("reduced system is not purely irrational");

    // Residues R: integer points of Theta([-eps,eps]^m) in the image lattice,
    // bounding box inflated by one cell, membership by exact solve.
    std::vector<long> bound(u, 0);
    for (std::size_t i = 0; i < u; ++i) {
        double b = 1.0;
        for (std::size_t k = 0; k < m; ++k) {
            double th = std::fabs(
                ExactScalar::from_rational(sys.basis(), rs.theta[i][k]).approx());
            b += th * eps[k];
        }
        bound[i] = static_cast<long>(std::floor(b));
    }
    ZMat ma_int(u, ZVec(u));
    for (std::size_t k = 0; k < u; ++k)
        for (std::size_t i = 0; i < u; ++i) ma_int[k][i] = lat.basis[i][k];
    std::vector<long> r_vec(u, 0);
    std::function<void(std::size_t)> enumerate = [&](std::size_t level) {
        if (level == u) {
            ZVec r(u);
            for (std::size_t i = 0; i < u; ++i) r[i] = r_vec[i];
            ZVec c;
            if (!solve_integer(ma_int, r, c)) return;
            ZVec shift(d, 0);
            for (std::size_t i = 0; i < u; ++i)
                for (std::size_t j = 0; j < d; ++j) shift[j] += c[i] * lat.lifts[i][j];
            bundle.shifts.push_back(size_reduce_against(shift, kernel_rows));
            return;
        }
        for (long v = -bound[level]; v <= bound[level]; ++v) {
            r_vec[level] = v;
            enumerate(level + 1);
        }
    };
    enumerate(0);

    // Support boxes for the transported cutoffs, one per shift:
    // |(P_bot L w)_i| <= sum_k |P_bot[i][k]| eps_k and the shift offset.
    for (const auto& shift : bundle.shifts) {
        // shift_vec = Y_I^{-1} (L shift - Lx A (S shift))_I, exact.
        ZVec s_shift(u, 0);
        for (std::size_t i = 0; i < u; ++i)
            for (std::size_t j = 0; j < d; ++j) s_shift[i] += s_mat[i][j] * shift[j];
        QVec ar(u, Rational(0));
        for (std::size_t r = 0; r < u; ++r)
            for (std::size_t i = 0; i < u; ++i) ar[r] += a_inv[r][i] * Rational(s_shift[i]);
        std::vector<ExactScalar> lshift = times_integer_vector(sys, shift);
        std::vector<ExactScalar> resid(m);
        for (std::size_t r = 0; r < m; ++r) {
            ExactScalar acc = lshift[r];
            for (std::size_t i = 0; i < u; ++i) acc = acc - lx_cols[i][r].scaled(ar[i]);
            resid[r] = std::move(acc);
        }
        std::vector<double> support(m - u, 0.0);
        for (std::size_t r = 0; r < m - u; ++r) {
            ExactScalar off = ExactScalar::from_rational(sys.basis(), Rational(0));
            for (std::size_t c = 0; c < m - u; ++c)
                off = off + resid[rows_i[c]].scaled(y_i_inv[r][c]);
            double s = std::fabs(off.approx()) + 1.0;
            for (std::size_t k = 0; k < m; ++k)
                s += std::fabs(bundle.p_matrix[u + r][k].approx()) * eps[k];
            support[r] = s;
        }
        bundle.shift_support.push_back(std::move(support));
    }

    bundle.dual_pair_margin = kernel_parametrization_check(bundle.xi, *bundle.l_prime);
    return bundle;
}

DecompositionCheck verify_decomposition(const LinearSystem& sys, const ReductionBundle& bundle,
                                        long n_limit, const std::vector<WeightFunction>& fs) {
    double max_shift = 0.0;
    for (const auto& shift : bundle.shifts)
        for (const auto& v : shift)
            max_shift = std::max(max_shift, std::fabs(mpz_get_d(v.get_mpz_t())));
    double coord_bound = static_cast<double>(n_limit) + max_shift + 2.0;

    CutoffSpec lhs_cutoff;
    lhs_cutoff.image = ImageCutoff::box_vector(bundle.eps);
    lhs_cutoff.coord_bound = coord_bound;
    CountResult lhs = count_brute(sys, n_limit, lhs_cutoff, fs);

    double rhs_raw = 0.0;
    for (std::size_t si = 0; si < bundle.shifts.size(); ++si) {
        CutoffSpec cutoff;
        cutoff.image =
            ImageCutoff::transported_box(sys, bundle.eps, bundle.shift_support[si]);
        cutoff.coord_bound = coord_bound;
        CountResult part = count_generalized(*bundle.l_prime, bundle.xi, bundle.shifts[si],
                                             n_limit, cutoff, fs);
        rhs_raw += part.raw_sum;
    }

    DecompositionCheck check;
    check.lhs = lhs.raw_sum;
    check.rhs = rhs_raw;
    check.max_abs_diff = std::fabs(lhs.raw_sum - rhs_raw);
    return check;
}

double kernel_parametrization_check(const ZMat& xi, const LinearSystem& lprime) {
    const std::size_t h = lprime.d();
    const std::size_t mp = lprime.m();
    const std::size_t d = xi.size();
    if (h <= mp) throw RankDeficient("kernel of the counting system is trivial");

    Eigen::MatrixXd a(mp, h);
    const auto& iv = lprime.entry_intervals();
    for (std::size_t i = 0; i < mp; ++i)
        for (std::size_t j = 0; j < h; ++j) a(i, j) = iv[i][j].mid();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    Eigen::MatrixXd phi = svd.matrixV().rightCols(h - mp); // orthonormal kernel basis

    Eigen::MatrixXd xm(d, h);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t t = 0; t < h; ++t) xm(j, t) = mpz_get_d(xi[j][t].get_mpz_t());
    Eigen::MatrixXd prod = xm * phi; // d x (h - mp)

    std::vector<std::vector<double>> rows(d, std::vector<double>(h - mp));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t t = 0; t < h - mp; ++t) rows[i][t] = prod(i, t);
    return row_multiple_margin(rows);
}

double row_multiple_margin(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double dot = 0.0, nj = 0.0, ni = 0.0;
            for (std::size_t t = 0; t < rows[i].size(); ++t) {
                dot += rows[i][t] * rows[j][t];
                nj += rows[j][t] * rows[j][t];
                ni += rows[i][t] * rows[i][t];
            }
            double resid2 = nj == 0.0 ? ni : ni - dot * dot / nj;
            margin = std::min(margin, std::sqrt(std::max(0.0, resid2)));
        }
    return margin;
}

} // namespace dioph
