#pragma once

#include <cstddef>
#include <vector>

#include "camp/series.hpp"
#include "camp/spectra.hpp"

namespace camp {

/// Convolution tap coefficients of the memory correction, kept in the
/// rational form G(z) = P(z)/Q(z) alongside the free design sequence theta
/// and r = q * theta. Invariants: theta_0 = g_0 = p_0 = q_0 = 1 and
/// q * g = p as truncated series.
struct TapSchedule {
    std::size_t T = 0;
    Series theta;
    Series g;
    Series p;
    Series q;
    Series r;

    /// Max coefficient-wise violation of q*g - p = 0 and r - q*theta = 0.
    double consistency_residual() const;
};

/// Three-tap design sequence: theta_0 = 1, theta_1 = -knob * d_s/a_s,
/// theta_2 = knob, zero afterwards, so that Theta(a_s/d_s) = 1 holds by
/// construction. knob = 0 recovers the plain identity sequence.
Series theta_schedule(double theta_knob, double a_s, double d_s, std::size_t T);

/// Taps for the i.i.d. Gaussian ensemble:
/// g_t = (1 - 1/delta) theta_t + (1/delta) sum_tau (theta_tau - theta_{tau-1}) theta_{t-tau},
/// with p = g and q = identity.
TapSchedule taps_iid_gaussian(const Series& theta, double delta, std::size_t T);

/// Taps for matrices with identical non-zero singular values (theta is the
/// identity sequence): g_tau = 1 - 1/delta for all tau >= 1.
TapSchedule taps_row_orthogonal(double delta, std::size_t T);

/// Row-orthogonal taps for a general theta, from the rational form
/// P(z) = ((1 - z^{-1})Theta(z) - 1 + delta)/delta, Q(z) = 1 - z^{-1}.
TapSchedule taps_row_orthogonal(const Series& theta, double delta, std::size_t T);

/// Taps for the geometric singular-value ladder with condition number kappa,
/// via the exponential-series coefficients of P and Qbar. theta must have
/// finite support and theta_0 - theta_1 != 0.
TapSchedule taps_geometric(const Series& theta, double kappa, double delta,
                           std::size_t T);

/// Dispatch on the ensemble kind.
TapSchedule schedule_for(const SpectralModel& model, const Series& theta,
                         std::size_t T);

struct TapOracleOptions {
    double overflow_bound = 1e30;
};

/// Tap coefficients from the coupled dynamical system {g_tau^(j)}, the
/// defining construction that the closed forms are validated against.
/// Requires exact moments up to order T + 2; the recursion amplifies input
/// noise, so approximate moments are not acceptable. Throws NumericalError
/// when a table entry exceeds the overflow bound.
std::vector<double> taps_oracle_dynamical(const std::vector<double>& moments,
                                          const Series& theta, std::size_t T,
                                          const TapOracleOptions& options = {});

/// Same recursion in extended precision with exact extended-precision
/// moments derived from the model's closed forms.
std::vector<double> taps_oracle_extended(const SpectralModel& model,
                                         const Series& theta, std::size_t T,
                                         const TapOracleOptions& options = {});

struct GeneratingIdentityReport {
    double max_residual = 0.0;
    std::vector<double> residuals;  // per order 0..T_check
};

/// Expands both sides of eta((1 - (1-z^{-1})Theta)/((1-z^{-1})G)) =
/// (1-z^{-1})Theta as formal power series in z^{-1} (internally in extended
/// precision) and reports the coefficient residuals up to order T_check.
GeneratingIdentityReport verify_generating_identity(const TapSchedule& schedule,
                                                    const SpectralModel& model,
                                                    std::size_t T_check);

}  // namespace camp
