#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dioph/approx.hpp"
#include "dioph/counter.hpp"
#include "dioph/gowers.hpp"
#include "dioph/linear_system.hpp"

namespace dioph {

struct SieveTable {
    std::size_t n_max = 0;
    std::vector<std::int8_t> mu;     // mu[n], index 1..n_max
    std::vector<std::int8_t> lambda; // Liouville lambda[n]
};

// Segmented factor sieve producing both tables. Memory guard: n_max <= 2e8.
SieveTable sieve(std::size_t n_max);

// S(N): the mu-weighted count of the mixed rational/irrational pattern
// n1 - n2 = n2 - n3, |(n2 - n3) - sqrt2 (n3 - n4)| <= 1/2 over [N]^4,
// via the two free parameters (n3, n4). Exact integer.
long long mobius_pattern_sum(const SieveTable& table, long n_limit);

// The same sum recomputed through the generic brute counter with mu-valued
// weights; exact agreement is the cross-check for the specialized loop.
long long mobius_pattern_sum_oracle(const SieveTable& table, long n_limit);

// The 1x3 three-term irrational progression system (1, -sqrt(k), sqrt(k)-1).
LinearSystem three_term_system(unsigned long sqrt_arg = 2);
// The 2x4 mixed rational/irrational pattern system behind S(N).
LinearSystem mobius_pattern_system();

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::string to_csv() const;
};

struct ExperimentConfig {
    std::string kind; // fourier_uniform_ap | mobius_orthogonality | theorem_empirical | approx_decay
    std::vector<long> n_grid;
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    double alpha = 0.5;
    double eps = 0.5;
    unsigned long beta_sqrt = 2;
    double tau1 = 0.25;
    std::vector<double> tau2_grid;
    // In-config assertions; the experiment outcome fails when violated.
    double assert_mean_rel_error = -1.0; // fourier_uniform_ap
    bool assert_decay = false;           // mobius two-point comparison
};

struct ExperimentOutcome {
    CsvTable table;
    bool assertions_passed = true;
    std::string summary;
};

// (N, alpha, pattern_count, main_term, rel_error, fourier_sup) per trial.
ExperimentOutcome run_fourier_uniform_ap(const ExperimentConfig& cfg);
// (N, S, S_over_N2).
ExperimentOutcome run_mobius(const ExperimentConfig& cfg);
// (N, trial, gowers_norm, T_abs) plus the fitted log-log slope in the summary.
ExperimentOutcome run_theorem_empirical(const ExperimentConfig& cfg);
// (tau2, lower, upper, witness_k) on the three-term system.
ExperimentOutcome run_approx_decay(const ExperimentConfig& cfg);

ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

} // namespace dioph
