#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dioph/exact.hpp"
#include "dioph/lattice.hpp"

namespace dioph {

struct RankMatrixInfo {
    std::vector<std::size_t> columns; // 0-based, size m
    double det = 0.0;
    double inverse_norm = 0.0; // ||M^{-1}||_inf
    bool exhaustive = true;    // false when the greedy fallback ran
};

struct RationalStructure {
    std::size_t u = 0;
    QMat theta;          // u x m, empty when u == 0
    Rational complexity; // max |theta entry|, 0 when purely irrational
    bool purely_irrational() const { return u == 0; }
};

struct ClassificationReport {
    std::size_t rank = 0;
    double rank_margin = 0.0;            // sigma_min of L
    double global_rank_margin = 0.0;     // min over deleted columns of sigma_min
    double dual_degeneracy_margin = 0.0; // min over deleted pairs of sigma_min
    bool in_dual_degeneracy_variety = false; // exact zero-margin certificate
    RankMatrixInfo rank_matrix;
    RationalStructure rational;
};

class LinearSystem {
  public:
    LinearSystem(BasisPtr basis, std::vector<std::vector<ExactScalar>> rows);

    LinearSystem(const LinearSystem& other);
    LinearSystem(LinearSystem&& other) noexcept;
    LinearSystem& operator=(const LinearSystem& other);
    LinearSystem& operator=(LinearSystem&& other) noexcept;

    static LinearSystem parse_rows(const BasisPtr& basis,
                                   const std::vector<std::vector<std::string>>& rows);

    std::size_t m() const { return rows_.size(); }
    std::size_t d() const { return rows_.empty() ? 0 : rows_[0].size(); }
    const ExactScalar& entry(std::size_t i, std::size_t j) const { return rows_[i][j]; }
    const std::vector<std::vector<ExactScalar>>& rows() const { return rows_; }
    const BasisPtr& basis() const { return basis_; }

    // 106-bit enclosures of the entries, cached.
    const std::vector<std::vector<Interval>>& entry_intervals() const;
    // Upper bound on max |entry|.
    double norm_inf_upper() const;

    const ClassificationReport& classify() const;

  private:
    BasisPtr basis_;
    std::vector<std::vector<ExactScalar>> rows_;

    mutable std::mutex cache_mutex_;
    mutable std::optional<std::vector<std::vector<Interval>>> intervals_;
    mutable std::optional<ClassificationReport> report_;
};

// Best m-subset of columns by |det|, per the quantitative row-rank principle.
// With exclude_column set, that column is never selected.
RankMatrixInfo rank_matrix(const LinearSystem& sys,
                           std::optional<std::size_t> exclude_column = std::nullopt);

// min over unordered column pairs {i,j} of sigma_min(L with i,j deleted);
// exactly 0 iff some row-space vector is supported on two or fewer coordinates.
double dual_degeneracy_margin(const LinearSystem& sys);

// Rational dimension u, a minimally scaled rational map, and its complexity.
RationalStructure rational_structure(const LinearSystem& sys);

} // namespace dioph
