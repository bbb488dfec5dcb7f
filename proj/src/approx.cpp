#include "dioph/approx.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>

#include "dioph/errors.hpp"
#include "dioph/parallel.hpp"

namespace dioph {

namespace {

double frac_dist(double x) { return std::fabs(x - std::round(x)); }

// Orthonormal basis of the row space of Theta (the annihilator of ker Theta).
Eigen::MatrixXd theta_range_basis(const RationalStructure& rs, std::size_t m) {
    Eigen::MatrixXd t(m, rs.u);
    for (std::size_t i = 0; i < rs.u; ++i)
        for (std::size_t k = 0; k < m; ++k)
            t(k, i) = ExactScalar::from_rational(ConstantBasis::empty(), rs.theta[i][k]).approx();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(t);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, rs.u);
    return q;
}

struct GridSpec {
    std::size_t m = 0;
    double radius = 0.0;
    double delta = 0.0;
    std::size_t per_dim = 0;
    std::uint64_t total = 0;
};

GridSpec make_grid(std::size_t m, double tau2, double delta) {
    GridSpec g;
    g.m = m;
    g.radius = 1.0 / tau2;
    g.delta = delta;
    g.per_dim = static_cast<std::size_t>(std::floor(2.0 * g.radius / delta)) + 1;
    g.total = 1;
    for (std::size_t i = 0; i < m; ++i) {
        g.total *= g.per_dim;
        if (g.total > 100000000ULL) throw BudgetExceeded("approximation grid too large");
    }
    return g;
}

} // namespace

double approx_lower(const LinearSystem& sys, const ApproxQuery& q) {
    if (!(q.tau1 > 0 && q.tau1 <= 1 && q.tau2 > 0 && q.tau2 <= 1 && q.delta > 0))
        throw Error("approximation query out of range");
    const std::size_t m = sys.m();
    const std::size_t d = sys.d();
    RationalStructure rs = rational_structure(sys);
    if (rs.u == m) return q.tau1;

    GridSpec grid = make_grid(m, q.tau2, q.delta);
    const auto& iv = sys.entry_intervals();
    std::vector<std::vector<double>> mid(m, std::vector<double>(d));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < d; ++j) mid[i][j] = iv[i][j].mid();

    Eigen::MatrixXd range;
    if (rs.u > 0) range = theta_range_basis(rs, m);

    // Enlarged feasible test keeps the bound valid: every truly feasible phi
    // lies within delta of an accepted grid point.
    const double feas_floor = q.tau1 - q.delta;

    auto slab = [&](std::size_t lo, std::size_t hi) {
        double best = std::numeric_limits<double>::infinity();
        std::vector<double> phi(m);
        std::vector<std::size_t> idx(m);
        Eigen::VectorXd v(m);
        for (std::size_t flat = lo; flat < hi; ++flat) {
            std::size_t rem = flat;
            for (std::size_t t = m; t-- > 0;) {
                idx[t] = rem % grid.per_dim;
                rem /= grid.per_dim;
            }
            for (std::size_t t = 0; t < m; ++t)
                phi[t] = -grid.radius + static_cast<double>(idx[t]) * grid.delta;

            if (rs.u > 0) {
                for (std::size_t t = 0; t < m; ++t) v(t) = phi[t];
                double dist2 = (v - range * (range.transpose() * v)).norm();
                if (dist2 < feas_floor) continue;
            } else {
                double norm = 0.0;
                for (double x : phi) norm = std::max(norm, std::fabs(x));
                if (norm < feas_floor) continue;
            }

            double value = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                double dot = 0.0;
                for (std::size_t i = 0; i < m; ++i) dot += phi[i] * mid[i][j];
                value = std::max(value, frac_dist(dot));
                if (value >= best) break;
            }
            best = std::min(best, value);
        }
        return best;
    };

    auto partials = parallel_block_map<double>(grid.total, 1 << 16, slab);
    double best = std::numeric_limits<double>::infinity();
    for (double p : partials) best = std::min(best, p);
    if (!std::isfinite(best)) return 0.0; // empty feasible grid

    double slack = static_cast<double>(m) * sys.norm_inf_upper() * q.delta + 1e-9;
    return std::max(0.0, best - slack);
}

ApproxResult approx_upper(const LinearSystem& sys, const ApproxQuery& q) {
    const std::size_t m = sys.m();
    const std::size_t d = sys.d();
    RationalStructure rs = rational_structure(sys);

    ApproxResult res;
    if (rs.u == m) {
        // A_L is identically tau1 by definition; record the distance-0 witness.
        res.definition_floor = true;
        res.lower_bound = q.tau1;
        res.upper_bound = q.tau1;
        res.witness_k.assign(m, 0);
        res.witness_k[0] = 1;
        res.witness_lattice.assign(d, 0);
        return res;
    }

    Eigen::MatrixXd range;
    if (rs.u > 0) range = theta_range_basis(rs, m);
    const double sqrt_m = std::sqrt(static_cast<double>(m));

    const long k_max = static_cast<long>(std::ceil(1.0 / q.tau2));
    const auto& iv = sys.entry_intervals();

    double best = std::numeric_limits<double>::infinity();
    std::vector<long> best_k;
    std::vector<long> k(m, -k_max);
    std::function<void(std::size_t)> scan = [&](std::size_t level) {
        if (level == m) {
            bool zero = true;
            for (long v : k)
                if (v != 0) zero = false;
            if (zero) return;
            if (rs.u > 0) {
                // Genuine feasibility needs the infinity-norm distance, lower
                // bounded by the Euclidean distance over sqrt(m).
                Eigen::VectorXd v(m);
                for (std::size_t t = 0; t < m; ++t) v(t) = static_cast<double>(k[t]);
                double dist2 = (v - range * (range.transpose() * v)).norm();
                if (dist2 / sqrt_m < q.tau1) return;
            }
            double value = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                double dot = 0.0;
                for (std::size_t i = 0; i < m; ++i)
                    dot += static_cast<double>(k[i]) * iv[i][j].mid();
                value = std::max(value, frac_dist(dot));
            }
            if (value < best) {
                best = value;
                best_k.assign(k.begin(), k.end());
            }
            return;
        }
        for (long v = -k_max; v <= k_max; ++v) {
            k[level] = v;
            scan(level + 1);
        }
    };
    scan(0);

    if (best_k.empty()) throw Error("no feasible integer witness in range");
    res.upper_bound = best;
    res.witness_k = best_k;
    res.witness_lattice.assign(d, 0);
    for (std::size_t j = 0; j < d; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            dot += static_cast<double>(best_k[i]) * iv[i][j].mid();
        res.witness_lattice[j] = std::lround(dot);
    }
    return res;
}

ApproxResult approx_query(const LinearSystem& sys, const ApproxQuery& q) {
    ApproxResult res = approx_upper(sys, q);
    if (!res.definition_floor) res.lower_bound = approx_lower(sys, q);
    return res;
}

DecayProbe algebraic_decay_probe(const LinearSystem& sys, double tau1,
                                 const std::vector<double>& tau2_grid) {
    DecayProbe probe;
    // Finest affordable spacing: the Lipschitz slack shrinks with the grid, so
    // spend a fixed per-dimension point budget on every tau2.
    double per_dim;
    switch (sys.m()) {
    case 1: per_dim = 4e7; break;
    case 2: per_dim = 5e3; break;
    default: per_dim = 3e2; break;
    }
    for (double tau2 : tau2_grid) {
        ApproxQuery q;
        q.tau1 = tau1;
        q.tau2 = tau2;
        q.delta = (2.0 / tau2) / per_dim;
        DecayRow row;
        row.tau2 = tau2;
        ApproxResult upper = approx_upper(sys, q);
        row.upper = upper.upper_bound;
        row.witness_k = upper.witness_k;
        row.lower = upper.definition_floor ? tau1 : approx_lower(sys, q);
        probe.table.push_back(std::move(row));
    }

    // Least-squares slope of log(lower) against log(tau2), zeros skipped.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& row : probe.table) {
        if (row.lower <= 0.0) continue;
        double x = std::log(row.tau2);
        double y = std::log(row.lower);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n >= 2) probe.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return probe;
}

} // namespace dioph
