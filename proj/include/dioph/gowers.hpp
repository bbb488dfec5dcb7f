#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace dioph {

// Bounded weight on [N] = {1..N}, extended by zero outside.
struct WeightFunction {
    std::size_t n_max = 0;
    std::vector<double> values; // values[i] = f(i+1)
    double bound = 1.0;

    double at(long n) const {
        return (n >= 1 && n <= static_cast<long>(n_max)) ? values[static_cast<std::size_t>(n - 1)]
                                                         : 0.0;
    }

    static WeightFunction ones(std::size_t n);
    static WeightFunction zeros(std::size_t n);
    static WeightFunction from_values(std::vector<double> v);
    static WeightFunction indicator(std::size_t n, const std::vector<char>& members);
};

enum class GowersMethod { Naive, Fft, Recursive };

struct GowersReport {
    std::size_t degree = 0;
    double norm_value = 0.0;
    double numerator = 0.0;   // S_f
    double denominator = 0.0; // S_1 (the |R| count) for interval norms
    GowersMethod method = GowersMethod::Naive;
};

// ||f||_{U^degree[N]} over the zero extension: (S_f / S_1)^{1/2^degree}.
// degree 2 runs the FFT autocorrelation identity, degree >= 3 the Delta_h
// recursion; degree 1 is |sum f| / N.
GowersReport gowers_interval(const WeightFunction& f, std::size_t degree);

// Independent O(N^{degree+1}) oracle over the same raw sums.
GowersReport gowers_interval_naive(const WeightFunction& f, std::size_t degree);

// Cyclic U^degree norm of values on Z/N'Z (real input).
double gowers_cyclic(const std::vector<double>& f, std::size_t degree);

// f_A = 1_A - alpha 1_[N], alpha = |A|/N.
WeightFunction balanced_function(std::size_t n, const std::vector<char>& members);

struct FourierSup {
    double value = 0.0;
    double grid_resolution = 0.0;
};
// Grid maximum of |(1/N) sum_n f(n) e(n theta)| on a zero-padded FFT grid.
FourierSup fourier_sup(const WeightFunction& f, std::size_t oversample = 4);

// Discrete Gowers inner product of 2^degree weights (index bit i = omega_i),
// normalized by N^{degree+1}.
double gowers_inner_product(const std::vector<WeightFunction>& fs, std::size_t degree);

// Radix-2 complex FFT via FFTW; input is zero-padded to a power of two by the
// callers. sign = -1 forward, +1 inverse (unnormalized).
void fft_inplace(std::vector<std::complex<double>>& a, int sign);

} // namespace dioph
