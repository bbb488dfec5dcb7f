#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dioph/counter.hpp"
#include "dioph/gowers.hpp"
#include "dioph/linear_system.hpp"

namespace dioph {

// Near-degenerate direction of a system: a row combination a with small
// residuals on all but two columns (the support pair carrying b1, b2).
struct DegeneracyDirection {
    std::vector<double> a; // scaled so the max-abs entry equals 1
    double b1 = 0.0;
    double b2 = 0.0;
    std::vector<std::size_t> column_order; // support pair first, then residual columns
    double eta = 0.0;                      // max |a . column| over residual columns
    double pair_sigma_min = 0.0;           // sigma_min of the pair-deleted matrix

    std::size_t support_col(int k) const { return column_order[static_cast<std::size_t>(k)]; }
};

// Scans unordered column pairs for the smallest sigma_min of the pair-deleted
// matrix; throws NoNearDegeneracy when the margin exceeds the threshold.
DegeneracyDirection detect_direction(const LinearSystem& sys, double threshold = 1e9);

// The 2x4 family whose distance to the dual degeneracy variety decays like
// N^{-1/2}: rows (1+1/N, -(sqrt3+N^{-1/2}), pi, -pi+sqrt2) and
// (2, -(2 sqrt3+N^{-1/2}), -sqrt5, e). Requires a perfect-square N so that
// the perturbations stay rational; the second column is oriented so the
// solution body meets [N]^4.
LinearSystem near_degenerate_family(long n);

// Case 2 interval weight: the indicator of [ceil(cut_fraction * N), N].
WeightFunction build_case2(long n_limit, double eta, double c1_const);

// Coupled random-block construction (case 3).
struct Case3Setup {
    long n_limit = 0;
    double eps = 0.0;
    std::size_t col_n1 = 0, col_n2 = 0; // original coordinates playing n1, n2
    double b1 = 0.0, b2 = 0.0;          // after the sign/order normalization
    double gamma = 0.0;                 // b1 / |b2| >= 1
    double eta = 0.0;
    double c1 = 0.0, c2 = 0.0, delta = 0.0;
    std::size_t n_blocks = 0; // K with N = K * block_len
    double block_len = 0.0;
    double x_offset = 0.0;
    double t_ones_raw = 0.0;   // total solution count
    double captured_raw = 0.0; // sum u(n) 1_{E_delta}(n) at the chosen offset
    std::size_t d = 0, m = 0;
    std::vector<double> u_weights;            // u(n1), 1-based shifted by -1
    std::vector<std::vector<double>> w_pair;  // block-level solution weights

    double normalizer() const;
    std::size_t block_of_n1(double n) const;
    std::size_t block_of_n2(double n) const;
};

// Enumerates the solution set twice (offset choice, then block weights).
Case3Setup prepare_case3(const LinearSystem& sys, long n_limit,
                         const DegeneracyDirection& dir, double eps,
                         double delta_override = -1.0);

struct BlockConstruction {
    std::uint64_t seed = 0;
    double p = 0.0;
    std::vector<char> block_chosen; // xi_i per block
    std::vector<char> a_set, b_set; // memberships of [N]
    WeightFunction f1, f2;
};

// Seed-deterministic coupled sample: block i goes entirely into A (and its
// dilate into B) with probability p.
BlockConstruction sample_case3(const Case3Setup& setup, double p, std::uint64_t seed);

// Exact T(f1, f2, 1, ..., 1) of a sample through the block weights.
double case3_t_value(const Case3Setup& setup, const BlockConstruction& sample);

struct ConverseParams {
    double eps = 0.5;
    double detect_threshold = 0.05; // NoNearDegeneracy above this sigma_min
    double c1_small = 0.05;         // case classification floor for |b|
    double p = -1.0;                // case 3 density; < 0 picks delta/4
    double delta = -1.0;            // < 0 picks min(1/8, 1.4 |b2|/(8 b1))
    std::size_t s = 1;              // Gowers degree s+1 used in reports
    std::size_t trials = 50;
    std::uint64_t seed = 1;
};

struct ConverseReport {
    int case_id = 0;
    double eta = 0.0;
    double t_ones = 0.0; // normalized T(1,...,1)
    // Case 2/4: rho = |f1 - 1|_{U^{s+1}}, t_gap = |T(f1,1,..) - T(1,..)|.
    // Case 3: means over trials of |f1 - p|_{U^{s+1}} and T(f1,f2,1,..) - p^2 T.
    double rho = 0.0;
    double rho_stderr = 0.0;
    double t_gap = 0.0;
    double t_gap_stderr = 0.0;
    double gap_threshold = 0.0;  // 1.5 delta p T(1,...,1) for case 3
    double norm_threshold = 0.0; // pinned-constant bound on rho
    bool gap_ok = false;
    bool norm_ok = false;
    double p = 0.0, delta = 0.0;
    std::size_t trials = 0;
    std::string note;
};

// Runs the applicable adversarial case and reports the small-norm /
// large-count witness pair. The H(rho) + E_rho(N) quantifiers of the converse
// statement cannot be ranged over; the report carries the witness values.
ConverseReport converse_verdict(const LinearSystem& sys, long n_limit,
                                const ConverseParams& params);

// Pinned regression constants, calibrated once on the seeded reference runs.
inline constexpr double kCase2NormConstant = 1.5; // C2 in |f1-1| <= C2 (C1 eta)^{(s+2)/2^{s+1}}
inline constexpr double kCase3NormConstant = 2.0; // K in E|f1-p| <= K eta^{1/2}

} // namespace dioph
