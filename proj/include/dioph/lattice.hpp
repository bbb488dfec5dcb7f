#pragma once

#include <vector>

#include "dioph/rational.hpp"

namespace dioph {

using ZVec = std::vector<mpz_class>;
using ZMat = std::vector<ZVec>; // row-major
using QVec = std::vector<Rational>;
using QMat = std::vector<QVec>;

struct HnfResult {
    ZMat H; // row Hermite normal form, U*M = H
    ZMat U; // unimodular
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_cols;
};

// Row-style HNF: pivots positive, entries below a pivot zero, entries above
// reduced into [0, pivot).
HnfResult hnf_rows(const ZMat& m);

// Saturated basis of {x in Z^d : S x = 0} as rows. Saturation comes from the
// unimodularity of the HNF transform.
ZMat integer_kernel_basis(const ZMat& s);

// Basis rows for the lattice S(Z^d) together with integer lifts, S*lift_i = basis_i.
struct ImageLatticeBasis {
    ZMat basis; // rank rows in Z^u
    ZMat lifts; // rank rows in Z^d
};
ImageLatticeBasis image_lattice_basis_of(const ZMat& s);

// Integer solution of S x = b, if one exists.
bool solve_integer(const ZMat& s, const ZVec& b, ZVec& x);

// Greedy infinity-norm reduction of x against the row lattice spanned by k.
ZVec size_reduce_against(const ZVec& x, const ZMat& k);

// Exact rational elimination helpers.
std::size_t rank_q(QMat m);
// Nullspace basis rows of {x : m x = 0}, in reduced echelon convention.
QMat nullspace_q(const QMat& m);
// Solves m x = b exactly; throws NoSolution / RankDeficient as appropriate.
QVec solve_q(QMat m, QVec b);
QMat invert_q(const QMat& m);
QMat matmul_q(const QMat& a, const QMat& b);

} // namespace dioph
