#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace dioph {

// System of homogeneous linear forms, rows psi_i on R^n.
struct FormSystem {
    std::size_t n_vars = 0;
    std::vector<std::vector<double>> forms;

    std::size_t n_forms() const { return forms.size(); }
    static FormSystem from_rows(std::vector<std::vector<double>> rows);
};

using Partition = std::vector<std::vector<std::size_t>>; // parts of [m] \ {i}

constexpr std::size_t kInfiniteComplexity = std::numeric_limits<std::size_t>::max();

struct ComplexityReport {
    std::size_t s = kInfiniteComplexity; // max(1, max_i s_i); infinite if any s_i is
    std::vector<std::size_t> s_i;        // per-form minimal part count - 1
    std::vector<Partition> best_partition; // per-form best suitable partition (empty if none)
    bool exhaustive = true;

    bool finite() const { return s != kInfiniteComplexity; }
};

// Euclidean residual of psi_i against the span of the given part.
double partition_residual(const FormSystem& psi, std::size_t i,
                          const std::vector<std::size_t>& part);

// c1-Cauchy-Schwarz complexity via suitable partitions. Exhaustive for
// m-1 <= 7; greedy merge beyond, flagged non-exhaustive.
ComplexityReport cs_complexity(const FormSystem& psi, double margin_floor);

struct NormalFormWitness {
    bool is_normal = false;
    std::vector<std::size_t> witness; // smallest coordinate set J_i
};

// Normal-form predicate at i: a coordinate set J where psi_i is nonzero on all
// of J and every other form vanishes somewhere on J. restrict limits the
// searched coordinates (sufficient for extensions).
NormalFormWitness is_normal_form(const FormSystem& psi, std::size_t i,
                                 std::optional<std::vector<std::size_t>> restrict_cols =
                                     std::nullopt);

struct NormalFormExtension {
    std::size_t target_index = 0;
    std::size_t s = 0;
    std::vector<std::vector<double>> shift_vectors; // s+1 vectors f_k in R^n
    FormSystem extended;                            // m x (n + s + 1)
    Partition partition;
    std::vector<double> margins; // per-part residual of psi_i
    bool pivot_budget_exceeded = false;
    NormalFormWitness witness;
};

// The bounded-coefficient normal-form extension: for each part C_k a shift
// f_k with psi_i(f_k) = 1 and psi_j(f_k) = 0 for j in C_k, chosen as the
// minimum-infinity-norm basic solution (pivot enumeration up to 2000 bases).
NormalFormExtension extend_normal_form(const FormSystem& psi, std::size_t i,
                                       const Partition& partition);

} // namespace dioph
