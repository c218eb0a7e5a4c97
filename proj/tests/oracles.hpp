// Test-only oracles, independent of the library's implementation paths:
// finite-size spectral sums, Monte-Carlo expectations, brute-force
// quadrature, and dense-matrix references.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

// Singular values of the geometric ladder at finite M (N = M/delta).
inline std::vector<double> ladder_sigma2(double kappa, double delta, std::size_t M) {
    const double N = static_cast<double>(M) / delta;
    const double lk = std::log(kappa);
    const double e1 = -std::expm1(-2.0 * lk / static_cast<double>(M - 1));
    const double eM = -std::expm1(-2.0 * lk * static_cast<double>(M) /
                                  static_cast<double>(M - 1));
    const double s0sq = N * e1 / eM;
    std::vector<double> out(M);
    for (std::size_t m = 0; m < M; ++m)
        out[m] = s0sq * std::exp(-2.0 * lk * static_cast<double>(m) /
                                 static_cast<double>(M - 1));
    return out;
}

// N^{-1} sum_m (sigma_m^2)^j at finite M.
inline double ladder_moment(double kappa, double delta, std::size_t M, int j) {
    const auto s2 = ladder_sigma2(kappa, delta, M);
    double acc = 0.0;
    for (double v : s2) acc += std::pow(v, j);
    return acc * delta / static_cast<double>(M);
}

// N^{-1} sum_n 1/(1 + x lambda_n) at finite M (zero eigenvalues included).
inline double ladder_eta(double kappa, double delta, std::size_t M, double x) {
    const auto s2 = ladder_sigma2(kappa, delta, M);
    double acc = 0.0;
    for (double v : s2) acc += 1.0 / (1.0 + x * v);
    const double N = static_cast<double>(M) / delta;
    return (acc + (N - static_cast<double>(M))) / N;
}

// One Richardson step assuming O(1/M) finite-size error.
inline double richardson(double at_m, double at_2m) { return 2.0 * at_2m - at_m; }

// Bernoulli-Gaussian sampler: zero w.p. 1-rho, else N(0, 1/rho).
inline double sample_bg(std::mt19937_64& rng, double rho) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, std::sqrt(1.0 / rho));
    return unif(rng) < rho ? normal(rng) : 0.0;
}

struct McEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

inline McEstimate mc_expectation(std::size_t samples, std::uint64_t seed,
                                 const std::function<double(std::mt19937_64&)>& draw) {
    std::mt19937_64 rng(seed);
    double acc = 0.0, acc2 = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double v = draw(rng);
        acc += v;
        acc2 += v * v;
    }
    McEstimate est;
    const double n = static_cast<double>(samples);
    est.mean = acc / n;
    const double var = std::max(acc2 / n - est.mean * est.mean, 0.0);
    est.standard_error = std::sqrt(var / n);
    return est;
}

// Posterior mean for the Bernoulli-Gaussian prior by direct grid quadrature
// over the active-component density (no Gauss-Hermite machinery).
inline double grid_posterior_mean(double y, double a, double rho,
                                  std::size_t points = 400001) {
    const double sd = std::sqrt(1.0 / rho);
    const double lo = -12.0 * sd, hi = 12.0 * sd;
    const double h = (hi - lo) / static_cast<double>(points - 1);
    auto gauss = [](double v, double var) {
        return std::exp(-0.5 * v * v / var) / std::sqrt(2.0 * M_PI * var);
    };
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double x = lo + h * static_cast<double>(i);
        const double wslice = (i == 0 || i == points - 1) ? 0.5 : 1.0;
        const double p = gauss(x, 1.0 / rho) * gauss(y - x, a);
        num += wslice * x * p;
        den += wslice * p;
    }
    num *= h * rho;
    den = den * h * rho + (1.0 - rho) * gauss(y, a);
    return num / den;
}

// Dense orthonormal Hadamard matrix (Sylvester order), for small sizes.
inline std::vector<double> dense_hadamard(std::size_t n) {
    std::vector<double> h(n * n, 1.0);
    for (std::size_t size = 1; size < n; size <<= 1) {
        for (std::size_t i = 0; i < size; ++i)
            for (std::size_t j = 0; j < size; ++j) {
                const double v = h[i * n + j];
                h[i * n + (j + size)] = v;
                h[(i + size) * n + j] = v;
                h[(i + size) * n + (j + size)] = -v;
            }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (double& v : h) v *= scale;
    return h;
}

}  // namespace oracles
