#include "camp/taps.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "camp/detail/moments.hpp"
#include "camp/detail/quad.hpp"
#include "camp/detail/series_ops.hpp"
#include "camp/errors.hpp"

namespace camp {

namespace {

void check_theta(const Series& theta) {
    if (theta.size() == 0 || theta[0] != 1.0)
        throw std::invalid_argument("tap schedule: theta_0 must equal 1");
}

void check_delta(double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("tap schedule: delta must lie in (0, 1]");
}

Series resize_to(const Series& s, std::size_t T) {
    Series out(T);
    for (std::size_t t = 0; t <= T && t < s.size(); ++t) out[t] = s[t];
    return out;
}

TapSchedule assemble(Series theta, Series p, Series q, std::size_t T) {
    TapSchedule sch;
    sch.T = T;
    sch.theta = std::move(theta);
    sch.p = std::move(p);
    sch.q = std::move(q);
    sch.g = sch.p.divide(sch.q);
    sch.r = sch.q.convolve(sch.theta);
    return sch;
}

}  // namespace

double TapSchedule::consistency_residual() const {
    const Series qg = q.convolve(g);
    const Series qtheta = q.convolve(theta);
    double worst = 0.0;
    for (std::size_t t = 0; t <= T; ++t) {
        worst = std::max(worst, std::abs(qg[t] - p[t]) / std::max(1.0, std::abs(p[t])));
        worst = std::max(worst,
                         std::abs(qtheta[t] - r[t]) / std::max(1.0, std::abs(r[t])));
    }
    return worst;
}

Series theta_schedule(double theta_knob, double a_s, double d_s, std::size_t T) {
    if (!(a_s > 0.0) || !(d_s > 0.0))
        throw std::invalid_argument("theta_schedule: a_s and d_s must be positive");
    Series theta(T);
    theta[0] = 1.0;
    if (T >= 1) theta[1] = -theta_knob * d_s / a_s;
    if (T >= 2) theta[2] = theta_knob;
    return theta;
}

TapSchedule taps_iid_gaussian(const Series& theta, double delta, std::size_t T) {
    check_theta(theta);
    check_delta(delta);
    const Series th = resize_to(theta, T);
    Series g(T);
    for (std::size_t t = 0; t <= T; ++t) {
        double conv = 0.0;
        for (std::size_t tau = 0; tau <= t; ++tau)
            conv += (th.at(static_cast<long>(tau)) - th.at(static_cast<long>(tau) - 1)) *
                    th[t - tau];
        g[t] = (1.0 - 1.0 / delta) * th[t] + conv / delta;
    }
    TapSchedule sch;
    sch.T = T;
    sch.theta = th;
    sch.g = g;
    sch.p = g;
    sch.q = Series::identity(T);
    sch.r = sch.q.convolve(th);
    return sch;
}

TapSchedule taps_row_orthogonal(double delta, std::size_t T) {
    return taps_row_orthogonal(Series::identity(T), delta, T);
}

TapSchedule taps_row_orthogonal(const Series& theta, double delta, std::size_t T) {
    check_theta(theta);
    check_delta(delta);
    const Series th = resize_to(theta, T);
    Series p(T);
    p[0] = 1.0;
    for (std::size_t t = 1; t <= T; ++t)
        p[t] = (th[t] - th[t - 1]) / delta;
    Series q(T);
    q[0] = 1.0;
    if (T >= 1) q[1] = -1.0;
    return assemble(th, p, q, T);
}

TapSchedule taps_geometric(const Series& theta, double kappa, double delta,
                           std::size_t T) {
    check_theta(theta);
    check_delta(delta);
    if (!(kappa > 1.0))
        throw std::invalid_argument("taps_geometric: kappa must exceed 1");
    const Series th = resize_to(theta, T);

    // theta_bar_t = theta_{t-1} - theta_t, the series of (1 - z^{-1})Theta(z)
    // minus its constant term.
    std::vector<double> theta_bar(T + 2, 0.0);
    for (std::size_t t = 1; t <= T + 1; ++t)
        theta_bar[t] = th.at(static_cast<long>(t) - 1) - th.at(static_cast<long>(t));
    if (theta_bar[1] == 0.0)
        throw std::invalid_argument(
            "taps_geometric: theta_0 - theta_1 must be non-zero (singular recursion)");
    std::size_t support = 1;
    for (std::size_t t = 1; t < theta_bar.size(); ++t)
        if (theta_bar[t] != 0.0) support = t;

    const double c = 2.0 * std::log(kappa) / delta;
    const double k2 = kappa * kappa;

    // beta = series of exp(C * Theta_bar(z)), formed as the convolution of
    // the single-term exponentials alpha^(j) = exp(C theta_bar_j z^{-j}):
    // alpha_t^(j) = C^{t/j} theta_bar_j^{t/j} / (t/j)! when j divides t, else 0.
    const std::size_t len = T + 2;  // qbar_t needs beta_{t+1}
    std::vector<double> beta(len, 0.0);
    beta[0] = 1.0;
    for (std::size_t j = 1; j <= support; ++j) {
        if (theta_bar[j] == 0.0) continue;
        std::vector<double> alpha(len, 0.0);
        alpha[0] = 1.0;
        double term = 1.0;
        for (std::size_t k = 1; j * k < len; ++k) {
            term *= c * theta_bar[j] / static_cast<double>(k);
            alpha[j * k] = term;
        }
        beta = detail::series_convolve(beta, alpha);
    }

    Series p(T);
    p[0] = 1.0;
    for (std::size_t t = 1; t <= T; ++t) p[t] = -beta[t] / (k2 - 1.0);

    std::vector<double> qbar(T + 1, 0.0);
    qbar[0] = 1.0;
    for (std::size_t t = 1; t <= T; ++t) {
        double acc = beta[t + 1] / c;
        for (std::size_t tau = 1; tau + 1 <= support && tau <= t; ++tau)
            acc -= theta_bar[tau + 1] * qbar[t - tau];
        qbar[t] = acc / theta_bar[1];
    }
    Series q(T);
    q[0] = 1.0;
    for (std::size_t t = 1; t <= T; ++t) q[t] = qbar[t] - qbar[t - 1];

    return assemble(th, p, q, T);
}

TapSchedule schedule_for(const SpectralModel& model, const Series& theta,
                         std::size_t T) {
    switch (model.kind) {
        case EnsembleKind::iid_gaussian:
            return taps_iid_gaussian(theta, model.delta, T);
        case EnsembleKind::row_orthogonal:
            return taps_row_orthogonal(theta, model.delta, T);
        case EnsembleKind::geometric:
            return taps_geometric(theta, model.kappa, model.delta, T);
    }
    throw std::logic_error("schedule_for: unknown ensemble");
}

namespace {

// Coupled dynamical system for the tap coefficients. Row tau of the table
// holds g_tau^(j); the tap g_tau is fixed first from the j = 1 entries of
// earlier rows (so that g_tau^(0) = 0 identically), then row tau is filled.
// Templated so it can run in extended precision: the moment sequence of
// ill-conditioned ensembles diverges geometrically and the recursion
// amplifies roundoff.
template <typename S>
std::vector<double> oracle_impl(const std::vector<S>& mu, const Series& theta,
                                std::size_t T, const TapOracleOptions& options) {
    const std::size_t order = mu.empty() ? 0 : mu.size() - 1;
    if (order < T + 2) {
        std::ostringstream msg;
        msg << "taps_oracle_dynamical: need moments up to order " << T + 2
            << ", got " << order;
        throw std::invalid_argument(msg.str());
    }
    if (theta.size() == 0 || theta[0] != 1.0)
        throw std::invalid_argument("taps_oracle_dynamical: theta_0 must equal 1");

    auto th = [&](std::size_t t) {
        return static_cast<S>(theta.at(static_cast<long>(t)));
    };
    const S bound = static_cast<S>(options.overflow_bound);

    // table[tau][j] = g_tau^(j); row tau is valid for j <= order - 1 - tau.
    std::vector<std::vector<S>> table(T);
    std::vector<S> tap(T + 1, S(0));
    tap[0] = S(1);

    if (T >= 1) {
        table[0].resize(order);
        for (std::size_t j = 0; j + 1 <= order; ++j) table[0][j] = mu[j + 1] - mu[j];
    }

    for (std::size_t tau = 1; tau <= T; ++tau) {
        // Tap from the Gaussianity condition g_tau^(0) = 0.
        if (tau == 1) {
            tap[1] = th(1) * (table[0][1] + S(1)) - table[0][1];
        } else {
            S acc = th(tau) - table[tau - 1][1];
            for (std::size_t tp = 0; tp < tau; ++tp)
                acc += th(tau - tp) * table[tp][1];
            for (std::size_t tp = 1; tp < tau; ++tp)
                acc -= th(tau - tp) * table[tp - 1][1];
            tap[tau] = acc;
        }

        if (tau == T) break;  // last tap does not need its table row

        const std::size_t jmax = order - 1 - tau;  // need j+1 <= order - tau
        table[tau].resize(jmax + 1);
        table[tau][0] = S(0);  // by construction of the tap
        for (std::size_t j = 1; j <= jmax; ++j) {
            S v;
            if (tau == 1) {
                v = table[0][j] - table[0][j + 1] - tap[1] * (table[0][j] + mu[j]) +
                    th(1) * (table[0][j + 1] + mu[j + 1]);
            } else {
                v = table[tau - 1][j] - table[tau - 1][j + 1] - tap[tau] * mu[j] +
                    th(tau) * mu[j + 1];
                for (std::size_t tp = 0; tp < tau; ++tp)
                    v += th(tau - tp) * table[tp][j + 1] - tap[tau - tp] * table[tp][j];
                for (std::size_t tp = 1; tp < tau; ++tp)
                    v -= th(tau - tp) * table[tp - 1][j + 1] -
                         tap[tau - tp] * table[tp - 1][j];
            }
            if (detail::qabs(static_cast<detail::quad>(v)) >
                static_cast<detail::quad>(bound)) {
                std::ostringstream msg;
                msg << "taps_oracle_dynamical: numerical instability, |g_" << tau
                    << "^(" << j << ")| = " << static_cast<double>(v)
                    << " exceeds the overflow bound " << options.overflow_bound;
                throw NumericalError(msg.str());
            }
            table[tau][j] = v;
        }
    }

    std::vector<double> g(T + 1);
    for (std::size_t tau = 0; tau <= T; ++tau) g[tau] = static_cast<double>(tap[tau]);
    return g;
}

}  // namespace

std::vector<double> taps_oracle_dynamical(const std::vector<double>& moments,
                                          const Series& theta, std::size_t T,
                                          const TapOracleOptions& options) {
    return oracle_impl<double>(moments, theta, T, options);
}

std::vector<double> taps_oracle_extended(const SpectralModel& model,
                                         const Series& theta, std::size_t T,
                                         const TapOracleOptions& options) {
    using detail::quad;
    std::vector<quad> mu;
    switch (model.kind) {
        case EnsembleKind::iid_gaussian:
            mu = detail::moments_iid_gaussian_t<quad>(model.delta, T + 2);
            break;
        case EnsembleKind::row_orthogonal:
            mu = detail::moments_row_orthogonal_t<quad>(model.delta, T + 2);
            break;
        case EnsembleKind::geometric:
            mu = detail::moments_geometric_t<quad>(model.kappa, model.delta, T + 2);
            break;
    }
    return oracle_impl<quad>(mu, theta, T, options);
}

GeneratingIdentityReport verify_generating_identity(const TapSchedule& schedule,
                                                    const SpectralModel& model,
                                                    std::size_t T_check) {
    using detail::quad;
    if (schedule.T < T_check)
        throw std::invalid_argument(
            "verify_generating_identity: schedule horizon below T_check");

    const std::size_t n = T_check + 1;
    std::vector<quad> theta_q(n, quad(0)), g_q(n, quad(0));
    for (std::size_t t = 0; t < n; ++t) {
        theta_q[t] = static_cast<quad>(schedule.theta[t]);
        g_q[t] = static_cast<quad>(schedule.g[t]);
    }

    // one_minus_u = 1 - z^{-1}
    std::vector<quad> one_minus_u(n, quad(0));
    one_minus_u[0] = quad(1);
    if (n > 1) one_minus_u[1] = quad(-1);

    const std::vector<quad> theta_tilde = detail::series_convolve(one_minus_u, theta_q);
    const std::vector<quad> g_tilde = detail::series_convolve(one_minus_u, g_q);

    // X = (1 - Theta_tilde) / G_tilde has zero constant term since theta_0 = 1.
    std::vector<quad> numer(n, quad(0));
    numer[0] = quad(1);
    numer = detail::series_sub(numer, theta_tilde);
    const std::vector<quad> x = detail::series_divide(numer, g_tilde);

    std::vector<quad> mu;
    switch (model.kind) {
        case EnsembleKind::iid_gaussian:
            mu = detail::moments_iid_gaussian_t<quad>(model.delta, T_check);
            break;
        case EnsembleKind::row_orthogonal:
            mu = detail::moments_row_orthogonal_t<quad>(model.delta, T_check);
            break;
        case EnsembleKind::geometric:
            mu = detail::moments_geometric_t<quad>(model.kappa, model.delta, T_check);
            break;
    }
    // eta(X) = sum_j mu_j (-X)^j as a formal series.
    std::vector<quad> eta_coeffs(mu);
    for (std::size_t j = 1; j < eta_coeffs.size(); j += 2) eta_coeffs[j] = -eta_coeffs[j];
    const std::vector<quad> lhs = detail::series_apply_power_series(eta_coeffs, x);

    GeneratingIdentityReport report;
    report.residuals.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double r = std::abs(static_cast<double>(lhs[t] - theta_tilde[t]));
        report.residuals[t] = r;
        report.max_residual = std::max(report.max_residual, r);
    }
    return report;
}

}  // namespace camp
