#include "dioph/gowers.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>

#include "dioph/errors.hpp"
#include "dioph/parallel.hpp"

namespace dioph {

namespace {

constexpr double kNaiveOpsGuard = 1e10;

std::mutex fftw_plan_mutex;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Raw sums for real inputs are nonnegative up to roundoff.
double clamp_nonneg(double v) { return v < 0.0 ? 0.0 : v; }

double raw_interval_sum_rec(const std::vector<double>& v, std::size_t degree,
                            std::vector<long>& h, std::size_t level) {
    const long n = static_cast<long>(v.size());
    if (level == degree) {
        double acc = 0.0;
        for (long x = 1; x <= n; ++x) {
            double prod = 1.0;
            for (std::size_t mask = 0; mask < (1ULL << degree) && prod != 0.0; ++mask) {
                long arg = x;
                for (std::size_t i = 0; i < degree; ++i)
                    if (mask & (1ULL << i)) arg += h[i];
                prod *= (arg >= 1 && arg <= n) ? v[static_cast<std::size_t>(arg - 1)] : 0.0;
            }
            acc += prod;
        }
        return acc;
    }
    double acc = 0.0;
    for (long hv = -(n - 1); hv <= n - 1; ++hv) {
        h[level] = hv;
        acc += raw_interval_sum_rec(v, degree, h, level + 1);
    }
    return acc;
}

// Raw interval sum S_f = sum_{x,h in Z^{degree+1}} prod_omega f(x + h.omega),
// zero extension; the independent nested-loop oracle. Degree 2 gets a direct
// triple loop, other degrees the generic recursion.
double raw_interval_sum(const std::vector<double>& v, std::size_t degree) {
    if (degree == 2) {
        const long n = static_cast<long>(v.size());
        double total = 0.0;
        for (long x = 1; x <= n; ++x) {
            double fx = v[x - 1];
            if (fx == 0.0) continue;
            for (long h1 = 1 - x; h1 <= n - x; ++h1) {
                double f1 = fx * v[x + h1 - 1];
                if (f1 == 0.0) continue;
                for (long h2 = 1 - x; h2 <= n - x; ++h2) {
                    long last = x + h1 + h2;
                    if (last < 1 || last > n) continue;
                    total += f1 * v[x + h2 - 1] * v[last - 1];
                }
            }
        }
        return total;
    }
    std::vector<long> h(degree, 0);
    return raw_interval_sum_rec(v, degree, h, 0);
}

double raw_sum_u1(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s * s;
}

double raw_sum_u2_fft(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    const std::size_t m = next_pow2(2 * n);
    std::vector<std::complex<double>> a(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i] = v[i];
    fft_inplace(a, -1);
    for (auto& z : a) z = std::norm(z);
    fft_inplace(a, +1);
    // a[k]/m is now the circular autocorrelation; padding >= 2n makes it linear.
    double s = 0.0;
    double c0 = a[0].real() / static_cast<double>(m);
    s += c0 * c0;
    for (std::size_t k = 1; k < n; ++k) {
        double c = a[k].real() / static_cast<double>(m);
        s += 2.0 * c * c;
    }
    return s;
}

double raw_sum_recursive(const std::vector<double>& v, std::size_t degree) {
    const long n = static_cast<long>(v.size());
    if (n == 0) return 0.0;
    if (degree == 1) return raw_sum_u1(v);
    if (degree == 2) return raw_sum_u2_fft(v);

    // S_k(f) = sum_h S_{k-1}(Delta_h f); h = 0 and +-|h| handled symmetrically
    // since Delta_{-h} f is a translate of Delta_h f.
    const std::size_t n_shifts = static_cast<std::size_t>(n); // h = 0..n-1
    auto partials = parallel_block_map<double>(n_shifts, 16, [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        std::vector<double> g;
        for (std::size_t h = lo; h < hi; ++h) {
            g.assign(v.size() - h, 0.0);
            for (std::size_t x = 0; x + h < v.size(); ++x) g[x] = v[x] * v[x + h];
            double s = raw_sum_recursive(g, degree - 1);
            acc += (h == 0) ? s : 2.0 * s;
        }
        return acc;
    });
    double total = 0.0;
    for (double p : partials) total += p;
    return total;
}

double naive_ops(std::size_t n, std::size_t degree) {
    return std::pow(static_cast<double>(n), static_cast<double>(degree + 1));
}

} // namespace

WeightFunction WeightFunction::ones(std::size_t n) {
    WeightFunction f;
    f.n_max = n;
    f.values.assign(n, 1.0);
    f.bound = 1.0;
    return f;
}

WeightFunction WeightFunction::zeros(std::size_t n) {
    WeightFunction f;
    f.n_max = n;
    f.values.assign(n, 0.0);
    f.bound = 1.0;
    return f;
}

WeightFunction WeightFunction::from_values(std::vector<double> v) {
    WeightFunction f;
    f.n_max = v.size();
    f.values = std::move(v);
    f.bound = 0.0;
    for (double x : f.values) f.bound = std::max(f.bound, std::fabs(x));
    if (f.bound == 0.0) f.bound = 1.0;
    return f;
}

WeightFunction WeightFunction::indicator(std::size_t n, const std::vector<char>& members) {
    WeightFunction f;
    f.n_max = n;
    f.values.assign(n, 0.0);
    for (std::size_t i = 0; i < n && i < members.size(); ++i)
        if (members[i]) f.values[i] = 1.0;
    f.bound = 1.0;
    return f;
}

void fft_inplace(std::vector<std::complex<double>>& a, int sign) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
                                reinterpret_cast<fftw_complex*>(a.data()),
                                sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        fftw_destroy_plan(plan);
    }
}

GowersReport gowers_interval(const WeightFunction& f, std::size_t degree) {
    if (degree < 1) throw Error("gowers degree must be >= 1");
    GowersReport rep;
    rep.degree = degree;
    if (degree <= 2) {
        rep.method = degree == 2 ? GowersMethod::Fft : GowersMethod::Naive;
    } else {
        rep.method = GowersMethod::Recursive;
        double est = std::pow(2.0 * f.n_max, static_cast<double>(degree - 2)) *
                     static_cast<double>(f.n_max) * 32.0;
        if (est > kNaiveOpsGuard) throw BudgetExceeded("gowers recursion too large");
    }
    rep.numerator = clamp_nonneg(raw_sum_recursive(f.values, degree));
    rep.denominator = raw_sum_recursive(std::vector<double>(f.n_max, 1.0), degree);
    rep.norm_value = rep.denominator > 0
                         ? std::pow(rep.numerator / rep.denominator,
                                    1.0 / static_cast<double>(1ULL << degree))
                         : 0.0;
    return rep;
}

GowersReport gowers_interval_naive(const WeightFunction& f, std::size_t degree) {
    if (degree < 1) throw Error("gowers degree must be >= 1");
    if (naive_ops(f.n_max, degree) > kNaiveOpsGuard)
        throw BudgetExceeded("naive gowers path over budget");
    GowersReport rep;
    rep.degree = degree;
    rep.method = GowersMethod::Naive;
    rep.numerator = clamp_nonneg(raw_interval_sum(f.values, degree));
    rep.denominator = raw_interval_sum(std::vector<double>(f.n_max, 1.0), degree);
    rep.norm_value = rep.denominator > 0
                         ? std::pow(rep.numerator / rep.denominator,
                                    1.0 / static_cast<double>(1ULL << degree))
                         : 0.0;
    return rep;
}

double gowers_cyclic(const std::vector<double>& f, std::size_t degree) {
    if (degree < 1) throw Error("gowers degree must be >= 1");
    const std::size_t n = f.size();
    if (n == 0) return 0.0;

    // s_k(g) = sum_h s_{k-1}(Delta_h g) with cyclic differencing.
    std::function<double(const std::vector<double>&, std::size_t)> raw =
        [&](const std::vector<double>& g, std::size_t k) -> double {
        if (k == 1) {
            double s = 0.0;
            for (double x : g) s += x;
            return s * s;
        }
        double acc = 0.0;
        std::vector<double> dg(n);
        for (std::size_t h = 0; h < n; ++h) {
            for (std::size_t x = 0; x < n; ++x) dg[x] = g[x] * g[(x + h) % n];
            acc += raw(dg, k - 1);
        }
        return acc;
    };
    double s = raw(f, degree);
    double denom = std::pow(static_cast<double>(n), static_cast<double>(degree + 1));
    return std::pow(clamp_nonneg(s) / denom, 1.0 / static_cast<double>(1ULL << degree));
}

WeightFunction balanced_function(std::size_t n, const std::vector<char>& members) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n && i < members.size(); ++i)
        if (members[i]) ++count;
    double alpha = n ? static_cast<double>(count) / static_cast<double>(n) : 0.0;
    WeightFunction f;
    f.n_max = n;
    f.values.assign(n, -alpha);
    for (std::size_t i = 0; i < n && i < members.size(); ++i)
        if (members[i]) f.values[i] = 1.0 - alpha;
    f.bound = std::max(alpha, 1.0 - alpha);
    if (count == 0 || count == n) {
        std::fill(f.values.begin(), f.values.end(), 0.0);
        f.bound = 1.0;
    }
    return f;
}

FourierSup fourier_sup(const WeightFunction& f, std::size_t oversample) {
    if (oversample < 4) throw Error("oversample factor must be >= 4");
    const std::size_t m = next_pow2(std::max<std::size_t>(1, oversample * f.n_max));
    std::vector<std::complex<double>> a(m, 0.0);
    for (std::size_t i = 0; i < f.n_max; ++i) a[i] = f.values[i];
    fft_inplace(a, -1);
    double best = 0.0;
    for (const auto& z : a) best = std::max(best, std::abs(z));
    FourierSup out;
    out.value = f.n_max ? best / static_cast<double>(f.n_max) : 0.0;
    out.grid_resolution = 1.0 / static_cast<double>(m);
    return out;
}

double gowers_inner_product(const std::vector<WeightFunction>& fs, std::size_t degree) {
    if (fs.size() != (1ULL << degree)) throw DimensionError("need 2^degree weight functions");
    const long n = static_cast<long>(fs[0].n_max);
    for (const auto& f : fs)
        if (static_cast<long>(f.n_max) != n) throw DimensionError("weights must share N");
    double ops = static_cast<double>(n) * std::pow(2.0 * n, static_cast<double>(degree));
    if (ops > 1e9) throw BudgetExceeded("gowers inner product over budget");

    std::vector<long> h(degree, 0);
    std::function<double(std::size_t)> loop = [&](std::size_t level) -> double {
        if (level == degree) {
            double acc = 0.0;
            for (long x = 1; x <= n; ++x) {
                double prod = 1.0;
                for (std::size_t mask = 0; mask < (1ULL << degree) && prod != 0.0; ++mask) {
                    long arg = x;
                    for (std::size_t i = 0; i < degree; ++i)
                        if (mask & (1ULL << i)) arg += h[i];
                    prod *= fs[mask].at(arg);
                }
                acc += prod;
            }
            return acc;
        }
        double acc = 0.0;
        for (long hv = -(n - 1); hv <= n - 1; ++hv) {
            h[level] = hv;
            acc += loop(level + 1);
        }
        return acc;
    };
    double raw = loop(0);
    return raw / std::pow(static_cast<double>(n), static_cast<double>(degree + 1));
}

} // namespace dioph
