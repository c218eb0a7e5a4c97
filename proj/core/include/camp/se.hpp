#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "camp/denoiser.hpp"
#include "camp/spectra.hpp"
#include "camp/taps.hpp"

namespace camp {

/// Two-index state-evolution tables: a_{t',t} is the pre-denoising error
/// covariance, d_{t',t} the post-denoising error correlation, both symmetric
/// with d_{0,0} = 1. xi_bar[t] is the effective denoiser derivative used in
/// the forgetting-factor products.
struct SeState {
    std::size_t T = 0;
    double sigma2 = 0.0;
    double zeta = 1.0;
    std::vector<double> a;       // row-major (T+1) x (T+1)
    std::vector<double> d;       // row-major (T+1) x (T+1)
    std::vector<double> xi_bar;  // size T

    bool diverged = false;
    std::size_t last_valid_t = 0;

    double a_at(std::size_t tp, std::size_t t) const { return a[tp * (T + 1) + t]; }
    double d_at(std::size_t tp, std::size_t t) const { return d[tp * (T + 1) + t]; }
    double a_diag(std::size_t t) const { return a_at(t, t); }
    double d_diag(std::size_t t) const { return d_at(t, t); }
};

struct FixedPoint {
    double a_s = 0.0;
    double d_s = 0.0;
    double xi_s = 0.0;
    double residual_a = 0.0;
    double residual_d = 0.0;
    std::size_t iterations = 0;
    /// Set when the two starting points (d = 1 and d = 1e-6) disagree,
    /// signalling a possible first-order phase-transition regime.
    std::optional<double> second_d_s;
};

struct FixedPointOptions {
    double damping = 0.5;
    std::size_t max_iterations = 10000;
    double tolerance = 1e-10;
};

/// Replica fixed point: a_s = sigma^2 / R(-d_s/sigma^2), d_s = mse(a_s),
/// solved by damped fixed-point iteration started from d = 1 (and from
/// d = 1e-6 as a uniqueness probe). Throws NumericalError with the iterate
/// trajectory when the iteration fails to settle.
FixedPoint solve_fixed_point(const SpectralModel& model, const ScalarPrior& prior,
                             double sigma2, const FixedPointOptions& options = {});

/// Precomputed coefficient arrays of the SE difference equation; entry (0,0)
/// of `memory` is the pivot solved for when marching the a-table.
struct ConvolutionKernel {
    std::size_t T = 0;
    std::vector<double> memory;       // multiplies a_{t'-tau',t-tau}
    std::vector<double> correlation;  // multiplies d_{t'-tau',t-tau}
    std::vector<double> noise;        // multiplies sigma^2

    double memory_at(std::size_t i, std::size_t j) const { return memory[i * (T + 1) + j]; }
    double correlation_at(std::size_t i, std::size_t j) const { return correlation[i * (T + 1) + j]; }
    double noise_at(std::size_t i, std::size_t j) const { return noise[i * (T + 1) + j]; }
};

ConvolutionKernel build_convolution_kernel(const TapSchedule& schedule);

/// CAMP state evolution: fills the a/d tables column by column
/// (boundary + correlation entries first, then the a-column by pivoting on
/// the (0,0) kernel entry), with the damped updates applied to d and xi_bar
/// when zeta < 1. Divergent regimes are flagged, not fatal: the tables are
/// valid up to last_valid_t.
SeState solve_camp_se(const TapSchedule& schedule, const ScalarPrior& prior,
                      double sigma2, std::size_t T, double zeta = 1.0);

struct AmpSeTrace {
    std::vector<double> v;     // v_t, t = 0..T
    std::vector<double> mmse;  // MMSE(v_t), the predicted MSE of x_{t+1}
};

/// AMP state evolution v_t = sigma^2 + MMSE(v_{t-1})/delta, MMSE(v_{-1}) = 1.
AmpSeTrace solve_amp_se(const ScalarPrior& prior, double sigma2, double delta,
                        std::size_t T);

struct OampSeTrace {
    std::vector<double> v_ab;       // v_{A->B,t},  t = 0..T-1
    std::vector<double> v_ba;       // v_{B->A,t},  t = 0..T
    std::vector<double> gamma_bar;  // t = 0..T-1
    std::vector<double> mse;        // MMSE(v_{A->B,t}), predicted MSE of the estimate
};

/// OAMP/VAMP state evolution with the spectral integral
/// gamma_bar = v / (1 - eta(v/sigma^2)). zeta < 1 damps the B->A variance
/// message, mirroring the damped algorithm.
OampSeTrace solve_oamp_se(const SpectralModel& model, const ScalarPrior& prior,
                          double sigma2, std::size_t T, double zeta = 1.0);

}  // namespace camp
