#include "dioph/constructions.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "dioph/errors.hpp"

namespace dioph {

namespace {

double positive_mod(double x, double modulus) {
    double r = std::fmod(x, modulus);
    return r < 0 ? r + modulus : r;
}

} // namespace

DegeneracyDirection detect_direction(const LinearSystem& sys, double threshold) {
    const std::size_t m = sys.m();
    const std::size_t d = sys.d();
    if (d < m + 2) throw DimensionError("need d >= m+2");
    rank_matrix(sys); // throws RankDeficient when rank < m

    const auto& iv = sys.entry_intervals();
    Eigen::MatrixXd a_mid(m, d);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < d; ++j) a_mid(i, j) = iv[i][j].mid();

    double best_sigma = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0, best_j = 1;
    Eigen::VectorXd best_a;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            Eigen::MatrixXd sub(m, d - 2);
            std::size_t t = 0;
            for (std::size_t c = 0; c < d; ++c) {
                if (c == i || c == j) continue;
                sub.col(t++) = a_mid.col(c);
            }
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeFullU);
            double sigma = svd.singularValues()(std::min(m, d - 2) - 1);
            if (sigma < best_sigma) {
                best_sigma = sigma;
                best_i = i;
                best_j = j;
                best_a = svd.matrixU().col(m - 1);
            }
        }
    if (best_sigma > threshold)
        throw NoNearDegeneracy("smallest pair-deleted sigma_min is " +
                               std::to_string(best_sigma));

    DegeneracyDirection dir;
    dir.pair_sigma_min = best_sigma;

    // Scale so the max-abs entry becomes exactly 1.
    std::size_t arg = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (std::fabs(best_a(i)) > std::fabs(best_a(arg))) arg = i;
    best_a /= best_a(arg);
    dir.a.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) dir.a[i] = best_a(i);

    dir.column_order = {best_i, best_j};
    for (std::size_t c = 0; c < d; ++c)
        if (c != best_i && c != best_j) dir.column_order.push_back(c);

    auto dot_col = [&](std::size_t c) {
        double v = 0.0;
        for (std::size_t i = 0; i < m; ++i) v += dir.a[i] * a_mid(i, c);
        return v;
    };
    dir.b1 = dot_col(best_i);
    dir.b2 = dot_col(best_j);
    dir.eta = 0.0;
    for (std::size_t t = 2; t < d; ++t)
        dir.eta = std::max(dir.eta, std::fabs(dot_col(dir.column_order[t])));
    return dir;
}

LinearSystem near_degenerate_family(long n) {
    long q = std::lround(std::sqrt(static_cast<double>(n)));
    if (q * q != n) throw Error("family instantiation needs a perfect-square N");
    std::vector<BasisConstant> cs;
    for (unsigned long a : {2UL, 3UL, 5UL}) {
        BasisConstant c;
        c.name = "sqrt" + std::to_string(a);
        c.kind = BasisConstant::Kind::Sqrt;
        c.sqrt_arg = a;
        cs.push_back(c);
    }
    BasisConstant pi_c;
    pi_c.name = "pi";
    pi_c.kind = BasisConstant::Kind::Pi;
    cs.push_back(pi_c);
    BasisConstant e_c;
    e_c.name = "e";
    e_c.kind = BasisConstant::Kind::E;
    cs.push_back(e_c);
    auto basis = ConstantBasis::make(std::move(cs));

    // The second column carries a flipped sign: it keeps the pair-deleted
    // margins, the direction a and (b1, b2) intact while the solution body
    // meets the positive orthant, so T(1,...,1) >> 1 holds as the converse
    // hypotheses require.
    std::string inv_n = "1/" + std::to_string(n);
    std::string inv_q = "1/" + std::to_string(q);
    return LinearSystem::parse_rows(
        basis, {{"1+" + inv_n, "-" + inv_q + "-1*sqrt3", "1*pi", "-1*pi+1*sqrt2"},
                {"2", "-" + inv_q + "-2*sqrt3", "-1*sqrt5", "1*e"}});
}

WeightFunction build_case2(long n_limit, double eta, double c1_const) {
    double cut = c1_const * eta * static_cast<double>(n_limit);
    if (cut >= static_cast<double>(n_limit)) throw DegenerateInterval("cut reaches past N");
    long start = std::max(1L, static_cast<long>(std::ceil(cut)));
    std::vector<char> members(n_limit, 0);
    for (long n = start; n <= n_limit; ++n) members[n - 1] = 1;
    return WeightFunction::indicator(n_limit, members);
}

double Case3Setup::normalizer() const {
    return std::pow(static_cast<double>(n_limit), static_cast<double>(d - m));
}

std::size_t Case3Setup::block_of_n1(double n) const {
    double y = positive_mod(n - x_offset, static_cast<double>(n_limit));
    auto i = static_cast<std::size_t>(y / block_len);
    return std::min(i, n_blocks - 1);
}

std::size_t Case3Setup::block_of_n2(double n) const { return block_of_n1(n / gamma); }

Case3Setup prepare_case3(const LinearSystem& sys, long n_limit, const DegeneracyDirection& dir,
                         double eps, double delta_override) {
    Case3Setup setup;
    setup.n_limit = n_limit;
    setup.eps = eps;
    setup.d = sys.d();
    setup.m = sys.m();
    // Exactly degenerate inputs get a 1/N floor so the block scale stays finite.
    setup.eta = std::max(dir.eta, 1.0 / static_cast<double>(n_limit));

    double b1 = dir.b1, b2 = dir.b2;
    std::size_t c1_col = dir.support_col(0), c2_col = dir.support_col(1);
    if (b1 * b2 >= 0.0) throw ParameterConflict("case 3 needs opposite signs of b1, b2");
    if (std::fabs(b1) < std::fabs(b2)) {
        std::swap(b1, b2);
        std::swap(c1_col, c2_col);
    }
    if (b1 < 0.0) {
        b1 = -b1;
        b2 = -b2;
    }
    setup.b1 = b1;
    setup.b2 = b2;
    setup.gamma = b1 / std::fabs(b2);
    setup.col_n1 = c1_col;
    setup.col_n2 = c2_col;

    // |b1 n1 + b2 n2| <= C1 eta N on solutions.
    double a_l1 = 0.0;
    for (double v : dir.a) a_l1 += std::fabs(v);
    double eta_n = setup.eta * static_cast<double>(n_limit);
    setup.c1 = static_cast<double>(sys.d() - 2) + eps * a_l1 / eta_n;
    setup.delta = delta_override > 0
                      ? delta_override
                      : std::min(0.125, 1.4 * std::fabs(b2) / (8.0 * b1));

    // Block count: (C1 C2 eta)^{-1} integral with C2 near the containment bound.
    double c2_target = 1.25 / ((0.5 - setup.delta) * b1);
    double k_real = 1.0 / (setup.c1 * setup.eta * c2_target);
    std::size_t k_blocks = static_cast<std::size_t>(std::llround(k_real));
    if (k_blocks < 2) throw ParameterConflict("fewer than two blocks; eta too large");
    k_blocks = std::min<std::size_t>(k_blocks, static_cast<std::size_t>(n_limit) / 4);
    setup.n_blocks = k_blocks;
    setup.block_len = static_cast<double>(n_limit) / static_cast<double>(k_blocks);
    setup.c2 = 1.0 / (setup.c1 * setup.eta * static_cast<double>(k_blocks));
    if (b1 * setup.c2 * (0.5 - setup.delta) < 1.0)
        throw ParameterConflict("delta too large for b1, b2 (containment fails)");

    // Pass 1: u(n1) histogram and the total count.
    setup.u_weights.assign(n_limit, 0.0);
    CutoffSpec cutoff;
    cutoff.image = ImageCutoff::box(sys.m(), eps);
    for_each_solution(sys, n_limit, cutoff, [&](std::span<const long> pt) {
        setup.t_ones_raw += 1.0;
        setup.u_weights[pt[setup.col_n1] - 1] += 1.0;
    });
    if (setup.t_ones_raw == 0.0)
        throw ParameterConflict("no solutions; the converse hypotheses need T(1,...,1) > 0");

    // Offset grid argmax of the captured mass.
    double best_captured = -1.0;
    double best_x = 0.0;
    for (std::size_t t = 0; t < setup.n_blocks; ++t) {
        double x = setup.block_len * static_cast<double>(t) /
                   static_cast<double>(setup.n_blocks);
        double captured = 0.0;
        for (long n = 1; n <= n_limit; ++n) {
            if (setup.u_weights[n - 1] == 0.0) continue;
            double y = positive_mod(static_cast<double>(n) - x, static_cast<double>(n_limit));
            double in_block = std::fmod(y, setup.block_len);
            if (std::fabs(in_block - setup.block_len * 0.5) < setup.delta * setup.block_len)
                captured += setup.u_weights[n - 1];
        }
        if (captured > best_captured) {
            best_captured = captured;
            best_x = x;
        }
    }
    setup.x_offset = best_x;
    setup.captured_raw = best_captured;

    // Pass 2: block-pair weights and containment validation.
    setup.w_pair.assign(setup.n_blocks, std::vector<double>(setup.n_blocks, 0.0));
    std::size_t containment_violations = 0;
    for_each_solution(sys, n_limit, cutoff, [&](std::span<const long> pt) {
        double n1 = static_cast<double>(pt[setup.col_n1]);
        double n2 = static_cast<double>(pt[setup.col_n2]);
        std::size_t bi = setup.block_of_n1(n1);
        std::size_t bj = setup.block_of_n2(n2);
        setup.w_pair[bi][bj] += 1.0;
        // Solutions captured by the delta-window must couple into the same block.
        double y = positive_mod(n1 - setup.x_offset, static_cast<double>(setup.n_limit));
        double in_block = std::fmod(y, setup.block_len);
        if (std::fabs(in_block - setup.block_len * 0.5) < setup.delta * setup.block_len &&
            bi != bj)
            ++containment_violations;
    });
    if (containment_violations > 0)
        throw ParameterConflict("delta window failed block containment on " +
                                std::to_string(containment_violations) + " solutions");
    return setup;
}

BlockConstruction sample_case3(const Case3Setup& setup, double p, std::uint64_t seed) {
    BlockConstruction sample;
    sample.seed = seed;
    sample.p = p;
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    sample.block_chosen.assign(setup.n_blocks, 0);
    for (auto& c : sample.block_chosen) c = coin(rng) ? 1 : 0;

    sample.a_set.assign(setup.n_limit, 0);
    sample.b_set.assign(setup.n_limit, 0);
    for (long n = 1; n <= setup.n_limit; ++n) {
        if (sample.block_chosen[setup.block_of_n1(static_cast<double>(n))])
            sample.a_set[n - 1] = 1;
        if (sample.block_chosen[setup.block_of_n2(static_cast<double>(n))])
            sample.b_set[n - 1] = 1;
    }
    sample.f1 = WeightFunction::indicator(setup.n_limit, sample.a_set);
    sample.f2 = WeightFunction::indicator(setup.n_limit, sample.b_set);
    return sample;
}

double case3_t_value(const Case3Setup& setup, const BlockConstruction& sample) {
    double raw = 0.0;
    for (std::size_t i = 0; i < setup.n_blocks; ++i) {
        if (!sample.block_chosen[i]) continue;
        for (std::size_t j = 0; j < setup.n_blocks; ++j) {
            if (!sample.block_chosen[j]) continue;
            raw += setup.w_pair[i][j];
        }
    }
    return raw / setup.normalizer();
}

ConverseReport converse_verdict(const LinearSystem& sys, long n_limit,
                                const ConverseParams& params) {
    DegeneracyDirection dir = detect_direction(sys, params.detect_threshold);

    ConverseReport rep;
    rep.eta = dir.eta;
    rep.note = "H(rho)+E_rho(N) range over all adversary functions; this report is the "
               "witness pair (min_j norm, |T| gap) for this N";

    const bool big1 = std::fabs(dir.b1) >= params.c1_small;
    const bool big2 = std::fabs(dir.b2) >= params.c1_small;
    if (!big1 && !big2)
        throw UnreachableCase("both |b1|, |b2| small: contradicts the rank margin");

    CutoffSpec cutoff;
    cutoff.image = ImageCutoff::box(sys.m(), params.eps);

    if (big1 && big2 && dir.b1 * dir.b2 < 0) {
        // Case 3: coupled random blocks.
        rep.case_id = 3;
        Case3Setup setup = prepare_case3(sys, n_limit, dir, params.eps, params.delta);
        rep.delta = setup.delta;
        rep.p = params.p > 0 ? params.p : setup.delta / 4.0;
        rep.t_ones = setup.t_ones_raw / setup.normalizer();
        rep.trials = params.trials;

        double sum_gap = 0.0, sum_gap2 = 0.0, sum_norm = 0.0, sum_norm2 = 0.0;
        for (std::size_t t = 0; t < params.trials; ++t) {
            std::uint64_t seed = params.seed ^ (0x9E3779B97F4A7C15ULL * (t + 1));
            BlockConstruction sample = sample_case3(setup, rep.p, seed);
            double gap = case3_t_value(setup, sample) - rep.p * rep.p * rep.t_ones;
            sum_gap += gap;
            sum_gap2 += gap * gap;

            std::vector<double> centered(setup.n_limit);
            for (long n = 0; n < n_limit; ++n)
                centered[n] = static_cast<double>(sample.a_set[n]) - rep.p;
            double norm =
                gowers_interval(WeightFunction::from_values(std::move(centered)), params.s + 1)
                    .norm_value;
            sum_norm += norm;
            sum_norm2 += norm * norm;
        }
        double nt = static_cast<double>(params.trials);
        rep.t_gap = sum_gap / nt;
        rep.t_gap_stderr = std::sqrt(std::max(0.0, sum_gap2 / nt - rep.t_gap * rep.t_gap) / nt);
        rep.rho = sum_norm / nt;
        rep.rho_stderr = std::sqrt(std::max(0.0, sum_norm2 / nt - rep.rho * rep.rho) / nt);
        rep.gap_threshold = 1.5 * rep.delta * rep.p * rep.t_ones;
        rep.norm_threshold = kCase3NormConstant * std::sqrt(rep.eta);
        rep.gap_ok = rep.t_gap - 1.96 * rep.t_gap_stderr >= rep.gap_threshold;
        rep.norm_ok = rep.rho + 1.96 * rep.rho_stderr <= rep.norm_threshold;
        return rep;
    }

    // Cases 2 and 4: one-sided interval construction on the n1 coordinate.
    rep.case_id = (big1 && big2) ? 2 : 4;
    double b_big = std::fabs(dir.b1) >= std::fabs(dir.b2) ? dir.b1 : dir.b2;
    std::size_t col = std::fabs(dir.b1) >= std::fabs(dir.b2) ? dir.support_col(0)
                                                             : dir.support_col(1);
    double a_l1 = 0.0;
    for (double v : dir.a) a_l1 += std::fabs(v);
    double eta_n = std::max(dir.eta * static_cast<double>(n_limit), 1e-12);
    double c1_const = static_cast<double>(sys.d() - 2) + params.eps * a_l1 / eta_n;
    // Case 2: b-terms share a sign, so n1 <= C1 eta N / b; case 4 absorbs the
    // small companion term |b2| n2 <= c1_small N.
    double cut_fraction = (c1_const * dir.eta +
                           (rep.case_id == 4 ? params.c1_small : 0.0)) /
                          std::fabs(b_big);
    WeightFunction f1 = build_case2(n_limit, cut_fraction, 1.0);

    std::vector<WeightFunction> fs(sys.d(), WeightFunction::ones(n_limit));
    CountResult ones = count_fast(sys, n_limit, cutoff, fs);
    fs[col] = f1;
    CountResult filtered = count_fast(sys, n_limit, cutoff, fs);

    std::vector<double> centered(n_limit);
    for (long n = 0; n < n_limit; ++n) centered[n] = f1.values[n] - 1.0;
    rep.rho = gowers_interval(WeightFunction::from_values(std::move(centered)), params.s + 1)
                  .norm_value;
    rep.t_ones = ones.normalized;
    rep.t_gap = std::fabs(filtered.normalized - ones.normalized);
    rep.trials = 1;
    double exponent = (static_cast<double>(params.s) + 2.0) /
                      std::pow(2.0, static_cast<double>(params.s) + 1.0);
    rep.norm_threshold =
        kCase2NormConstant * std::pow(std::max(cut_fraction, 1e-300), exponent);
    rep.norm_ok = rep.rho <= rep.norm_threshold;
    rep.gap_threshold = 0.5 * rep.t_ones;
    rep.gap_ok = rep.t_gap >= rep.gap_threshold;
    return rep;
}

} // namespace dioph
