#include "dioph/counter.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "dioph/errors.hpp"
#include "dioph/parallel.hpp"

namespace dioph {

namespace {

constexpr std::size_t kBlockSize = 4096;

double ramp_outside(double x, double lo, double hi, double width) {
    double dist = 0.0;
    if (x < lo) dist = lo - x;
    else if (x > hi) dist = x - hi;
    if (dist >= width) return 0.0;
    return 1.0 - dist / width;
}

// Signed distance to the box boundary (nonnegative both sides).
double dist_to_boundary(std::span<const double> x, std::span<const double> lo,
                        std::span<const double> hi) {
    double outside = 0.0;
    double inside = std::numeric_limits<double>::infinity();
    bool is_outside = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < lo[i]) {
            is_outside = true;
            outside = std::max(outside, lo[i] - x[i]);
        } else if (x[i] > hi[i]) {
            is_outside = true;
            outside = std::max(outside, x[i] - hi[i]);
        } else {
            inside = std::min(inside, std::min(x[i] - lo[i], hi[i] - x[i]));
        }
    }
    return is_outside ? outside : inside;
}

struct RowTests {
    std::vector<std::vector<double>> mid;
    std::vector<double> err;

    static RowTests build(const LinearSystem& sys, double coord_bound) {
        const auto& iv = sys.entry_intervals();
        RowTests rt;
        rt.mid.assign(sys.m(), std::vector<double>(sys.d()));
        rt.err.assign(sys.m(), 0.0);
        for (std::size_t i = 0; i < sys.m(); ++i) {
            double hw_sum = 0.0, mag_sum = 0.0;
            for (std::size_t j = 0; j < sys.d(); ++j) {
                rt.mid[i][j] = iv[i][j].mid();
                hw_sum += 0.5 * iv[i][j].width();
                mag_sum += std::fabs(rt.mid[i][j]);
            }
            rt.err[i] = coord_bound *
                        (hw_sum + static_cast<double>(sys.d() + 2) * 0x1p-52 * mag_sum);
        }
        return rt;
    }

    double value(std::size_t i, std::span<const long> p) const {
        double v = 0.0;
        const auto& row = mid[i];
        for (std::size_t j = 0; j < row.size(); ++j) v += row[j] * static_cast<double>(p[j]);
        return v;
    }
};

enum class Tri { Out, In, Ambiguous };

Tri combine(Tri a, Tri b) {
    if (a == Tri::Out || b == Tri::Out) return Tri::Out;
    if (a == Tri::Ambiguous || b == Tri::Ambiguous) return Tri::Ambiguous;
    return Tri::In;
}

Tri box_row_decide(double v, double err, double eps) {
    double a = std::fabs(v);
    if (a <= eps - err) return Tri::In;
    if (a > eps + err) return Tri::Out;
    return Tri::Ambiguous;
}

struct GEval {
    bool include = false;
    bool ambiguous = false;
    double weight = 0.0;
};

struct Kernel {
    const LinearSystem* count_sys = nullptr; // tested at the enumeration point n
    const LinearSystem* base_sys = nullptr;  // tested at w for TransportedBox
    RowTests count_tests;
    RowTests base_tests;
    const CutoffSpec* cutoff = nullptr;
    const std::vector<WeightFunction>* fs = nullptr;
    std::vector<std::vector<long>> xi; // d x h (int64)
    std::vector<long> rtilde;          // d
    bool xi_identity = true;
    long n_limit = 0;
    long w_lo = 1, w_hi = 0; // variable support range in w coordinates
    std::vector<long> box_lo, box_hi; // enumeration box for n
    double var_width = 0.0;           // lipschitz ramp width (sigma*N)

    std::size_t h() const { return box_lo.size(); }
    std::size_t d() const { return xi.size(); }

    void transport(std::span<const long> n, std::vector<long>& w) const {
        if (xi_identity) {
            std::copy(n.begin(), n.end(), w.begin());
            return;
        }
        for (std::size_t j = 0; j < xi.size(); ++j) {
            long acc = rtilde[j];
            for (std::size_t t = 0; t < n.size(); ++t) acc += xi[j][t] * n[t];
            w[j] = acc;
        }
    }

    bool in_variable_support(std::span<const long> w) const {
        for (long c : w)
            if (c < w_lo || c > w_hi) return false;
        return true;
    }

    double variable_weight(std::span<const long> w) const {
        if (cutoff->variable.kind == VariableCutoff::Kind::Sharp) return 1.0;
        double prod = 1.0;
        for (long c : w) {
            prod *= ramp_outside(static_cast<double>(c), 1.0, static_cast<double>(n_limit),
                                 var_width);
            if (prod == 0.0) return 0.0;
        }
        return prod;
    }

    GEval image_eval(std::span<const long> n, std::span<const long> w) const {
        const ImageCutoff& g = cutoff->image;
        GEval out;
        switch (g.kind) {
        case ImageCutoff::Kind::Box: {
            Tri t = Tri::In;
            for (std::size_t i = 0; i < count_tests.mid.size() && t != Tri::Out; ++i)
                t = combine(t, box_row_decide(count_tests.value(i, n), count_tests.err[i],
                                              g.eps[i]));
            out.include = t != Tri::Out;
            out.ambiguous = t == Tri::Ambiguous;
            out.weight = out.include ? 1.0 : 0.0;
            return out;
        }
        case ImageCutoff::Kind::TransportedBox: {
            Tri t = Tri::In;
            for (std::size_t i = 0; i < base_tests.mid.size() && t != Tri::Out; ++i)
                t = combine(t, box_row_decide(base_tests.value(i, w), base_tests.err[i],
                                              g.eps[i]));
            out.include = t != Tri::Out;
            out.ambiguous = t == Tri::Ambiguous;
            out.weight = out.include ? 1.0 : 0.0;
            return out;
        }
        case ImageCutoff::Kind::Polytope: {
            // Membership = eps-box AND all half-spaces, interval semantics.
            Tri t = Tri::In;
            const std::size_t m = count_tests.mid.size();
            std::vector<double> v(m), e(m);
            for (std::size_t i = 0; i < m && t != Tri::Out; ++i) {
                v[i] = count_tests.value(i, n);
                e[i] = count_tests.err[i];
                t = combine(t, box_row_decide(v[i], e[i], g.eps[i]));
            }
            for (std::size_t k = 0; k < g.poly_a.size() && t != Tri::Out; ++k) {
                double lo = 0.0, hi = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    double a = g.poly_a[k][i];
                    lo += a >= 0 ? a * (v[i] - e[i]) : a * (v[i] + e[i]);
                    hi += a >= 0 ? a * (v[i] + e[i]) : a * (v[i] - e[i]);
                }
                Tri hk = hi <= g.poly_b[k] ? Tri::In
                                           : (lo > g.poly_b[k] ? Tri::Out : Tri::Ambiguous);
                t = combine(t, hk);
            }
            out.include = t != Tri::Out;
            out.ambiguous = t == Tri::Ambiguous;
            out.weight = out.include ? 1.0 : 0.0;
            return out;
        }
        case ImageCutoff::Kind::LipschitzTent: {
            double prod = 1.0;
            for (std::size_t i = 0; i < count_tests.mid.size() && prod != 0.0; ++i) {
                double v = count_tests.value(i, n);
                prod *= ramp_outside(v, -g.eps[i], g.eps[i], g.sigma * g.eps[i]);
            }
            out.include = prod > 0.0;
            out.weight = prod;
            return out;
        }
        }
        return out;
    }

    double fs_product(std::span<const long> w) const {
        double prod = 1.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            prod *= (*fs)[j].at(w[j]);
            if (prod == 0.0) return 0.0;
        }
        return prod;
    }
};

struct Partial {
    double raw = 0.0;
    std::uint64_t visited = 0;
    std::uint64_t ambiguous = 0;
};

void process_point(const Kernel& k, std::span<const long> n, std::vector<long>& w,
                   Partial& acc) {
    k.transport(n, w);
    if (!k.in_variable_support(w)) return;
    GEval g = k.image_eval(n, w);
    if (!g.include) return;
    ++acc.visited;
    if (g.ambiguous) ++acc.ambiguous;
    double weight = k.fs_product(w);
    if (weight == 0.0) return;
    if (k.cutoff->variable.kind != VariableCutoff::Kind::Sharp) weight *= k.variable_weight(w);
    acc.raw += weight * g.weight;
}

// Decodes a flat index into coordinates over the given ranges (last fastest).
void decode(std::uint64_t idx, const std::vector<long>& lo, const std::vector<long>& hi,
            std::vector<long>& out) {
    for (std::size_t t = out.size(); t-- > 0;) {
        std::uint64_t size = static_cast<std::uint64_t>(hi[t] - lo[t] + 1);
        out[t] = lo[t] + static_cast<long>(idx % size);
        idx /= size;
    }
}

// Box (in the counting system's image coordinates) that contains the support
// of the image cutoff; candidate generation is sound against it.
std::vector<double> image_support(const ImageCutoff& g) {
    if (g.kind == ImageCutoff::Kind::TransportedBox) return g.support;
    std::vector<double> s = g.eps;
    if (g.kind == ImageCutoff::Kind::LipschitzTent)
        for (auto& v : s) v *= 1.0 + g.sigma;
    return s;
}

Kernel make_kernel(const LinearSystem& count_sys, const ZMat& xi, const ZVec& rtilde,
                   long n_limit, const CutoffSpec& cutoff,
                   const std::vector<WeightFunction>& fs) {
    Kernel k;
    k.count_sys = &count_sys;
    k.cutoff = &cutoff;
    k.fs = &fs;
    k.n_limit = n_limit;

    const std::size_t h = count_sys.d();
    const std::size_t d = xi.size();
    if (fs.size() != d) throw DimensionError("need one weight per transported coordinate");

    k.xi.assign(d, std::vector<long>(h, 0));
    k.rtilde.assign(d, 0);
    k.xi_identity = (d == h);
    for (std::size_t j = 0; j < d; ++j) {
        if (xi[j].size() != h) throw DimensionError("xi shape mismatch");
        for (std::size_t t = 0; t < h; ++t) {
            k.xi[j][t] = static_cast<long>(xi[j][t].get_si());
            if (k.xi[j][t] != ((j == t) ? 1 : 0)) k.xi_identity = false;
        }
        k.rtilde[j] = static_cast<long>(rtilde[j].get_si());
        if (k.rtilde[j] != 0) k.xi_identity = false;
    }

    // Variable support in w coordinates.
    if (cutoff.variable.kind == VariableCutoff::Kind::Sharp) {
        k.w_lo = 1;
        k.w_hi = n_limit;
    } else {
        k.var_width = cutoff.variable.sigma * static_cast<double>(n_limit);
        k.w_lo = static_cast<long>(std::ceil(1.0 - k.var_width));
        k.w_hi = static_cast<long>(std::floor(static_cast<double>(n_limit) + k.var_width));
    }

    // Enumeration box for n: pull the w box back through xi.
    k.box_lo.assign(h, k.w_lo);
    k.box_hi.assign(h, k.w_hi);
    if (!k.xi_identity) {
        Eigen::MatrixXd xm(d, h);
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t t = 0; t < h; ++t) xm(j, t) = static_cast<double>(k.xi[j][t]);
        Eigen::MatrixXd pinv =
            (xm.transpose() * xm).inverse() * xm.transpose(); // h x d, xi injective
        for (std::size_t t = 0; t < h; ++t) {
            double lo = 0.0, hi = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                double c = pinv(t, j);
                double a = c * (static_cast<double>(k.w_lo) - k.rtilde[j]);
                double b = c * (static_cast<double>(k.w_hi) - k.rtilde[j]);
                lo += std::min(a, b);
                hi += std::max(a, b);
            }
            k.box_lo[t] = static_cast<long>(std::floor(lo)) - 2;
            k.box_hi[t] = static_cast<long>(std::ceil(hi)) + 2;
        }
    }

    double coord_bound = cutoff.coord_bound.value_or(
        static_cast<double>(std::max(std::labs(k.w_lo), std::labs(k.w_hi)) + 2));
    double n_bound = coord_bound;
    for (std::size_t t = 0; t < h; ++t)
        n_bound = std::max(n_bound,
                           static_cast<double>(std::max(std::labs(k.box_lo[t]), std::labs(k.box_hi[t]))));

    k.count_tests = RowTests::build(count_sys, n_bound);
    if (cutoff.image.kind == ImageCutoff::Kind::TransportedBox) {
        if (!cutoff.image.base) throw Error("transported cutoff needs a base system");
        k.base_sys = cutoff.image.base;
        k.base_tests = RowTests::build(*cutoff.image.base, coord_bound);
    }
    return k;
}

CountResult run_brute(const Kernel& k) {
    const std::size_t h = k.h();
    std::uint64_t total = 1;
    for (std::size_t t = 0; t < h; ++t) {
        long span = k.box_hi[t] - k.box_lo[t] + 1;
        if (span <= 0) return CountResult{0.0, 0.0, 0, 0, "brute"};
        total *= static_cast<std::uint64_t>(span);
        if (static_cast<double>(total) > k.cutoff->brute_budget)
            throw BudgetExceeded("brute enumeration over budget");
    }
    auto partials = parallel_block_map<Partial>(total, kBlockSize,
        [&](std::size_t lo, std::size_t hi) {
            Partial acc;
            std::vector<long> n(h), w(k.d());
            decode(lo, k.box_lo, k.box_hi, n);
            for (std::size_t idx = lo; idx < hi; ++idx) {
                process_point(k, n, w, acc);
                // Odometer step, last coordinate fastest.
                for (std::size_t t = h; t-- > 0;) {
                    if (n[t] < k.box_hi[t]) {
                        ++n[t];
                        break;
                    }
                    n[t] = k.box_lo[t];
                }
            }
            return acc;
        });
    Partial total_acc;
    for (const auto& p : partials) {
        total_acc.raw += p.raw;
        total_acc.visited += p.visited;
        total_acc.ambiguous += p.ambiguous;
    }
    CountResult res;
    res.raw_sum = total_acc.raw;
    res.solutions_visited = total_acc.visited;
    res.boundary_ambiguous = total_acc.ambiguous;
    res.method = "brute";
    return res;
}

CountResult run_fast(const Kernel& k) {
    const std::size_t h = k.h();
    const std::size_t m = k.count_sys->m();
    RankMatrixInfo rm = rank_matrix(*k.count_sys);

    std::vector<std::size_t> heads = rm.columns;
    std::vector<std::size_t> tails;
    for (std::size_t t = 0; t < h; ++t)
        if (std::find(heads.begin(), heads.end(), t) == heads.end()) tails.push_back(t);

    std::vector<double> support = image_support(k.cutoff->image);
    if (support.size() != m) throw DimensionError("image support size mismatch");

    Eigen::MatrixXd msub(m, m);
    const auto& iv = k.count_sys->entry_intervals();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t t = 0; t < m; ++t) msub(i, t) = iv[i][heads[t]].mid();
    Eigen::MatrixXd minv = msub.inverse();

    std::vector<double> radius(m, 1.0);
    for (std::size_t kk = 0; kk < m; ++kk)
        for (std::size_t i = 0; i < m; ++i) radius[kk] += std::fabs(minv(kk, i)) * support[i];

    std::uint64_t tail_total = 1;
    std::vector<long> tlo(tails.size()), thi(tails.size());
    for (std::size_t t = 0; t < tails.size(); ++t) {
        tlo[t] = k.box_lo[tails[t]];
        thi[t] = k.box_hi[tails[t]];
        long span = thi[t] - tlo[t] + 1;
        if (span <= 0) return CountResult{0.0, 0.0, 0, 0, "fast"};
        tail_total *= static_cast<std::uint64_t>(span);
    }

    auto partials = parallel_block_map<Partial>(tail_total, kBlockSize,
        [&](std::size_t blo, std::size_t bhi) {
            Partial acc;
            std::vector<long> tail(tails.size());
            std::vector<long> n(h), w(k.d());
            std::vector<long> hlo(m), hhi(m);
            for (std::size_t idx = blo; idx < bhi; ++idx) {
                decode(idx, tlo, thi, tail);
                for (std::size_t t = 0; t < tails.size(); ++t) n[tails[t]] = tail[t];
                // Candidate box for head variables.
                for (std::size_t kk = 0; kk < m; ++kk) {
                    double center = 0.0;
                    for (std::size_t i = 0; i < m; ++i) {
                        double dot = 0.0;
                        for (std::size_t t = 0; t < tails.size(); ++t)
                            dot += k.count_tests.mid[i][tails[t]] * static_cast<double>(tail[t]);
                        center -= minv(kk, i) * dot;
                    }
                    long lo = static_cast<long>(std::ceil(center - radius[kk]));
                    long hi = static_cast<long>(std::floor(center + radius[kk]));
                    hlo[kk] = std::max(lo, k.box_lo[heads[kk]]);
                    hhi[kk] = std::min(hi, k.box_hi[heads[kk]]);
                }
                // Enumerate heads.
                std::vector<long> head(m);
                std::function<void(std::size_t)> rec = [&](std::size_t level) {
                    if (level == m) {
                        for (std::size_t kk = 0; kk < m; ++kk) n[heads[kk]] = head[kk];
                        process_point(k, n, w, acc);
                        return;
                    }
                    for (long v = hlo[level]; v <= hhi[level]; ++v) {
                        head[level] = v;
                        rec(level + 1);
                    }
                };
                rec(0);
            }
            return acc;
        });

    Partial total_acc;
    for (const auto& p : partials) {
        total_acc.raw += p.raw;
        total_acc.visited += p.visited;
        total_acc.ambiguous += p.ambiguous;
    }
    CountResult res;
    res.raw_sum = total_acc.raw;
    res.solutions_visited = total_acc.visited;
    res.boundary_ambiguous = total_acc.ambiguous;
    res.method = "fast";
    return res;
}

void finalize(CountResult& res, long n_limit, std::size_t h, std::size_t m) {
    res.normalized =
        res.raw_sum / std::pow(static_cast<double>(n_limit), static_cast<double>(h - m));
}

ZMat identity_z(std::size_t n) {
    ZMat id(n, ZVec(n, 0));
    for (std::size_t i = 0; i < n; ++i) id[i][i] = 1;
    return id;
}

} // namespace

double LipschitzBoxPair::f_value(std::span<const double> x) const {
    double prod = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        prod *= ramp_outside(x[i], lo[i], hi[i], width);
        if (prod == 0.0) return 0.0;
    }
    return prod;
}

double LipschitzBoxPair::g_value(std::span<const double> x) const {
    double d = dist_to_boundary(x, lo, hi);
    if (d >= width) return 0.0;
    return 1.0 - d / width;
}

LipschitzBoxPair build_lipschitz_cutoffs(std::span<const double> lo, std::span<const double> hi,
                                         double sigma) {
    if (!(sigma > 0.0 && sigma < 0.5)) throw Error("sigma must lie in (0, 1/2)");
    LipschitzBoxPair pair;
    pair.lo.assign(lo.begin(), lo.end());
    pair.hi.assign(hi.begin(), hi.end());
    double scale = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) scale = std::max(scale, hi[i] - lo[i]);
    pair.width = sigma * scale;
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (hi[i] - lo[i] <= 2.0 * pair.width)
            throw DegenerateGeometry("sigma-erosion empties the box");
    return pair;
}

VariableCutoff VariableCutoff::lipschitz(double sigma) {
    if (!(sigma > 0.0 && sigma < 0.5)) throw Error("sigma must lie in (0, 1/2)");
    VariableCutoff f;
    f.kind = Kind::Lipschitz;
    f.sigma = sigma;
    return f;
}

ImageCutoff ImageCutoff::box(std::size_t m, double eps_value) {
    ImageCutoff g;
    g.kind = Kind::Box;
    g.eps.assign(m, eps_value);
    return g;
}

ImageCutoff ImageCutoff::box_vector(std::vector<double> eps) {
    ImageCutoff g;
    g.kind = Kind::Box;
    g.eps = std::move(eps);
    return g;
}

ImageCutoff ImageCutoff::polytope(std::vector<std::vector<double>> a, std::vector<double> b,
                                  std::vector<double> support_eps) {
    ImageCutoff g;
    g.kind = Kind::Polytope;
    g.poly_a = std::move(a);
    g.poly_b = std::move(b);
    g.eps = std::move(support_eps);
    return g;
}

ImageCutoff ImageCutoff::lipschitz_tent(std::size_t m, double eps_value, double sigma) {
    if (!(sigma > 0.0 && sigma < 0.5)) throw Error("sigma must lie in (0, 1/2)");
    ImageCutoff g;
    g.kind = Kind::LipschitzTent;
    g.eps.assign(m, eps_value);
    g.sigma = sigma;
    return g;
}

ImageCutoff ImageCutoff::transported_box(const LinearSystem& base, std::vector<double> eps,
                                         std::vector<double> support) {
    ImageCutoff g;
    g.kind = Kind::TransportedBox;
    g.base = &base;
    g.eps = std::move(eps);
    g.support = std::move(support);
    return g;
}

CountResult count_brute(const LinearSystem& sys, long n_limit, const CutoffSpec& cutoff,
                        const std::vector<WeightFunction>& fs) {
    Kernel k = make_kernel(sys, identity_z(sys.d()), ZVec(sys.d(), 0), n_limit, cutoff, fs);
    CountResult res = run_brute(k);
    finalize(res, n_limit, sys.d(), sys.m());
    return res;
}

CountResult count_fast(const LinearSystem& sys, long n_limit, const CutoffSpec& cutoff,
                       const std::vector<WeightFunction>& fs) {
    Kernel k = make_kernel(sys, identity_z(sys.d()), ZVec(sys.d(), 0), n_limit, cutoff, fs);
    CountResult res = run_fast(k);
    finalize(res, n_limit, sys.d(), sys.m());
    return res;
}

CountResult count_generalized(const LinearSystem& lprime, const ZMat& xi, const ZVec& rtilde,
                              long n_limit, const CutoffSpec& cutoff,
                              const std::vector<WeightFunction>& fs, bool brute) {
    if (xi.empty() || xi[0].size() != lprime.d())
        throw DimensionError("xi must map R^h into R^d with h = cols(L')");
    if (rank_q([&] {
            QMat q(xi.size(), QVec(xi[0].size()));
            for (std::size_t i = 0; i < xi.size(); ++i)
                for (std::size_t j = 0; j < xi[0].size(); ++j) q[i][j] = Rational(xi[i][j]);
            return q;
        }()) != xi[0].size())
        throw Error("xi must be injective");
    Kernel k = make_kernel(lprime, xi, rtilde, n_limit, cutoff, fs);
    CountResult res = brute ? run_brute(k) : run_fast(k);
    finalize(res, n_limit, lprime.d(), lprime.m());
    return res;
}

void for_each_solution(const LinearSystem& sys, long n_limit, const CutoffSpec& cutoff,
                       const std::function<void(std::span<const long>)>& visit) {
    std::vector<WeightFunction> fs(sys.d(), WeightFunction::ones(n_limit));
    Kernel k = make_kernel(sys, identity_z(sys.d()), ZVec(sys.d(), 0), n_limit, cutoff, fs);

    const std::size_t h = k.h();
    const std::size_t m = sys.m();
    RankMatrixInfo rm = rank_matrix(sys);
    std::vector<std::size_t> heads = rm.columns;
    std::vector<std::size_t> tails;
    for (std::size_t t = 0; t < h; ++t)
        if (std::find(heads.begin(), heads.end(), t) == heads.end()) tails.push_back(t);

    std::vector<double> support = image_support(cutoff.image);
    Eigen::MatrixXd msub(m, m);
    const auto& iv = sys.entry_intervals();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t t = 0; t < m; ++t) msub(i, t) = iv[i][heads[t]].mid();
    Eigen::MatrixXd minv = msub.inverse();
    std::vector<double> radius(m, 1.0);
    for (std::size_t kk = 0; kk < m; ++kk)
        for (std::size_t i = 0; i < m; ++i) radius[kk] += std::fabs(minv(kk, i)) * support[i];

    std::vector<long> tail(tails.size()), n(h), w(k.d()), head(m), hlo(m), hhi(m);
    std::vector<long> tlo(tails.size()), thi(tails.size());
    std::uint64_t tail_total = 1;
    for (std::size_t t = 0; t < tails.size(); ++t) {
        tlo[t] = k.box_lo[tails[t]];
        thi[t] = k.box_hi[tails[t]];
        long span = thi[t] - tlo[t] + 1;
        if (span <= 0) return;
        tail_total *= static_cast<std::uint64_t>(span);
    }
    for (std::uint64_t idx = 0; idx < tail_total; ++idx) {
        decode(idx, tlo, thi, tail);
        for (std::size_t t = 0; t < tails.size(); ++t) n[tails[t]] = tail[t];
        for (std::size_t kk = 0; kk < m; ++kk) {
            double center = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                double dot = 0.0;
                for (std::size_t t = 0; t < tails.size(); ++t)
                    dot += k.count_tests.mid[i][tails[t]] * static_cast<double>(tail[t]);
                center -= minv(kk, i) * dot;
            }
            hlo[kk] = std::max(static_cast<long>(std::ceil(center - radius[kk])),
                               k.box_lo[heads[kk]]);
            hhi[kk] = std::min(static_cast<long>(std::floor(center + radius[kk])),
                               k.box_hi[heads[kk]]);
        }
        std::function<void(std::size_t)> rec = [&](std::size_t level) {
            if (level == m) {
                for (std::size_t kk = 0; kk < m; ++kk) n[heads[kk]] = head[kk];
                k.transport(n, w);
                if (!k.in_variable_support(w)) return;
                GEval g = k.image_eval(n, w);
                if (g.include) visit(std::span<const long>(n.data(), n.size()));
                return;
            }
            for (long v = hlo[level]; v <= hhi[level]; ++v) {
                head[level] = v;
                rec(level + 1);
            }
        };
        rec(0);
    }
}

} // namespace dioph
