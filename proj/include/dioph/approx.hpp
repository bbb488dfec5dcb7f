#pragma once

#include <vector>

#include "dioph/linear_system.hpp"

namespace dioph {

struct ApproxQuery {
    double tau1 = 0.25;
    double tau2 = 0.25;
    double delta = 1e-4; // grid spacing for the certified lower bound
};

struct ApproxResult {
    double lower_bound = 0.0; // certified: the true infimum is >= this
    double upper_bound = 0.0;
    std::vector<double> lower_argmin;   // grid point attaining the minimum
    std::vector<long> witness_k;        // integer dual vector of the upper bound
    std::vector<long> witness_lattice;  // nearest lattice point to L^T k
    bool definition_floor = false;      // u = m case where A_L is tau1 by fiat
};

// Grid lower bound for the approximation function: min over the (enlarged)
// feasible grid of dist(L^T phi, Z^d) minus the Lipschitz slack m |L| delta,
// floored at 0. Throws BudgetExceeded past 1e8 grid points.
double approx_lower(const LinearSystem& sys, const ApproxQuery& q);

// Integer-witness upper bound: best feasible k with 1 <= |k|_inf <= ceil(1/tau2).
// For u = m returns tau1 (the definition) with a distance-0 integral witness.
ApproxResult approx_upper(const LinearSystem& sys, const ApproxQuery& q);

// Both bounds in one report.
ApproxResult approx_query(const LinearSystem& sys, const ApproxQuery& q);

struct DecayRow {
    double tau2 = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::vector<long> witness_k;
};

struct DecayProbe {
    std::vector<DecayRow> table;
    double fitted_exponent = 0.0; // least-squares slope of log(lower) vs log(tau2)
};

// Empirical probe of the algebraic-coefficient decay: certified lower bounds
// across a tau2 grid with self-scaled spacing, plus the fitted exponent.
DecayProbe algebraic_decay_probe(const LinearSystem& sys, double tau1,
                                 const std::vector<double>& tau2_grid);

} // namespace dioph
