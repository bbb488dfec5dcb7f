#pragma once

#include <memory>
#include <vector>

#include "dioph/counter.hpp"
#include "dioph/lattice.hpp"
#include "dioph/linear_system.hpp"

namespace dioph {

// Output of the purely-irrational reduction: L = sum over shifts of the
// transported counts through Xi, with L' = pi P L Xi purely irrational.
struct ReductionBundle {
    std::size_t u = 0;
    QMat theta; // u x m rational map

    // Xi as a d x h integer matrix (h = d - u); columns span ker(Theta L) over Z.
    ZMat xi;
    std::vector<ZVec> shifts; // R~: integer d-vectors, one per residue hit

    // Change of basis P (m x m over the scalar ring); top u rows rational.
    std::vector<std::vector<ExactScalar>> p_matrix;

    std::shared_ptr<LinearSystem> l_prime; // (m-u) x h, purely irrational

    ZMat lattice_basis_a; // u rows: basis of Theta L (Z^d)
    ZMat lifts_x;         // u rows: integer lifts, S x_i = a_i

    std::vector<double> eps;                        // image box the bundle was built for
    std::vector<std::vector<double>> shift_support; // per shift: support box of G_r in L' coords
    double dual_pair_margin = 0.0;                  // advisory, part-(7) transfer check

    std::size_t h() const { return xi.empty() ? 0 : xi[0].size(); }
};

// Lattice basis of S(Z^d) with Babai-reduced integer lifts; S must be
// surjective with integer entries.
ImageLatticeBasis image_lattice_basis(const ZMat& s);

// The dimension-reduction algorithm. eps is the per-row half-width of the
// image box G the bundle will be used with. Throws UseRationalPath when
// u = m; returns the trivial bundle when u = 0.
ReductionBundle reduce(const LinearSystem& sys, const std::vector<double>& eps);
ReductionBundle reduce(const LinearSystem& sys, double eps);

struct DecompositionCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double max_abs_diff = 0.0;
};

// Brute LHS against the sum of transported counts; exact zero difference for
// integer-weighted inputs under the shared tie policy.
DecompositionCheck verify_decomposition(const LinearSystem& sys, const ReductionBundle& bundle,
                                        long n_limit, const std::vector<WeightFunction>& fs);

// Margin of Xi*Phi against the degeneracy variety, Phi an orthonormal kernel
// basis of the counting system: min over ordered row pairs of the residual
// of row_i against multiples of row_j.
double kernel_parametrization_check(const ZMat& xi, const LinearSystem& lprime);

// min over ordered pairs (i, j), i != j, of min_lambda |row_i - lambda row_j|_2;
// zero iff some row is a real multiple of another.
double row_multiple_margin(const std::vector<std::vector<double>>& rows);

} // namespace dioph
