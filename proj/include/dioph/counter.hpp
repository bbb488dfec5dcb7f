#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dioph/gowers.hpp"
#include "dioph/lattice.hpp"
#include "dioph/linear_system.hpp"

namespace dioph {

// Piecewise-linear box pair from the convex-cutoff approximation lemma:
// f >= 1_K everywhere, f = 1 on K, f = 0 outside the width-dilated box;
// g = 1 on the boundary of K, 0 at distance width from it, |1_K - f| <= g.
struct LipschitzBoxPair {
    std::vector<double> lo, hi;
    double width = 0.0;

    double f_value(std::span<const double> x) const;
    double g_value(std::span<const double> x) const;
};

// kind "variable": box [1,N]^dim with ramp width sigma*N.
// kind "image": box [-eps_i, eps_i] with ramp width sigma*eps_i.
LipschitzBoxPair build_lipschitz_cutoffs(std::span<const double> lo, std::span<const double> hi,
                                         double sigma);

struct VariableCutoff {
    enum class Kind { Sharp, Lipschitz };
    Kind kind = Kind::Sharp;
    double sigma = 0.0;

    static VariableCutoff sharp() { return {}; }
    static VariableCutoff lipschitz(double sigma);
};

struct ImageCutoff {
    enum class Kind { Box, Polytope, LipschitzTent, TransportedBox };
    Kind kind = Kind::Box;

    // Box / LipschitzTent / support of the others: per-row half-widths.
    std::vector<double> eps;
    double sigma = 0.0; // tent ramp = sigma * eps_i

    // Polytope rows a.y <= b, support contained in the eps box.
    std::vector<std::vector<double>> poly_a;
    std::vector<double> poly_b;

    // TransportedBox: |base(xi n + r)|_inf <= eps tested exactly on the base
    // system; support box in the counting system's image coordinates.
    const LinearSystem* base = nullptr;
    std::vector<double> support;

    static ImageCutoff box(std::size_t m, double eps_value);
    static ImageCutoff box_vector(std::vector<double> eps);
    static ImageCutoff polytope(std::vector<std::vector<double>> a, std::vector<double> b,
                                std::vector<double> support_eps);
    static ImageCutoff lipschitz_tent(std::size_t m, double eps_value, double sigma);
    static ImageCutoff transported_box(const LinearSystem& base, std::vector<double> eps,
                                       std::vector<double> support);
};

struct CutoffSpec {
    VariableCutoff variable;
    ImageCutoff image;
    // Shared coordinate bound for the interval error budget; callers that need
    // bit-identical decisions across two evaluations pin it explicitly.
    std::optional<double> coord_bound;
    // Point guard for the brute path; oracle recomputations may raise it.
    double brute_budget = 1e9;
};

struct CountResult {
    double raw_sum = 0.0;
    double normalized = 0.0;
    std::uint64_t solutions_visited = 0;   // points passing the image cutoff
    std::uint64_t boundary_ambiguous = 0;  // of those, interval-ambiguous ones
    std::string method;
};

// Full d-fold loop over the variable box; the oracle path. Guard: N^d <= 1e9.
CountResult count_brute(const LinearSystem& sys, long n_limit, const CutoffSpec& cutoff,
                        const std::vector<WeightFunction>& fs);

// Rank-matrix head/tail enumeration; exactly equal to count_brute for
// integer-weighted inputs under the shared tie policy.
CountResult count_fast(const LinearSystem& sys, long n_limit, const CutoffSpec& cutoff,
                       const std::vector<WeightFunction>& fs);

// T^{L',Xi,r}: weights f_j(xi_j(n) + r_j), image cutoff on L' n (or the
// transported base test), normalized by N^{h-m'}.
CountResult count_generalized(const LinearSystem& lprime, const ZMat& xi, const ZVec& rtilde,
                              long n_limit, const CutoffSpec& cutoff,
                              const std::vector<WeightFunction>& fs, bool brute = false);

// Enumerates every lattice point of [1,N]^d passing the image cutoff
// (ambiguous included), fast path, single-threaded; visitor gets the point.
void for_each_solution(const LinearSystem& sys, long n_limit, const CutoffSpec& cutoff,
                       const std::function<void(std::span<const long>)>& visit);

} // namespace dioph
