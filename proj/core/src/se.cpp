#include "camp/se.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "camp/detail/se_kernel.hpp"
#include "camp/errors.hpp"

namespace camp {

namespace {

double fixed_point_sweep(const SpectralModel& model, const ScalarPrior& prior,
                         double sigma2, double d_start,
                         const FixedPointOptions& options, std::size_t& iterations) {
    double d = d_start;
    std::vector<double> tail;
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
        const double a = sigma2 / r_transform(model, -d / sigma2);
        const double d_next = (1.0 - options.damping) * d + options.damping * prior.mse(a);
        if (std::abs(d_next - d) <= options.tolerance * options.damping) {
            iterations = it + 1;
            return d_next;
        }
        d = d_next;
        if (it + 8 >= options.max_iterations) tail.push_back(d);
    }
    std::ostringstream msg;
    msg << "solve_fixed_point: no convergence after " << options.max_iterations
        << " iterations from d = " << d_start << "; trailing iterates:";
    for (double v : tail) msg << " " << v;
    throw NumericalError(msg.str());
}

}  // namespace

FixedPoint solve_fixed_point(const SpectralModel& model, const ScalarPrior& prior,
                             double sigma2, const FixedPointOptions& options) {
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("solve_fixed_point: sigma2 must be positive");
    FixedPoint fp;
    double d = fixed_point_sweep(model, prior, sigma2, 1.0, options, fp.iterations);
    // Polish: a few undamped sweeps tighten the residual to the tolerance.
    for (int k = 0; k < 64; ++k) {
        const double a = sigma2 / r_transform(model, -d / sigma2);
        const double d_next = prior.mse(a);
        if (std::abs(d_next - d) <= 1e-16 * (1.0 + d)) { d = d_next; break; }
        d = 0.5 * (d + d_next);
    }
    fp.d_s = d;
    fp.a_s = sigma2 / r_transform(model, -d / sigma2);
    fp.xi_s = fp.d_s / fp.a_s;
    fp.residual_a = std::abs(fp.a_s - sigma2 / r_transform(model, -fp.d_s / sigma2));
    fp.residual_d = std::abs(fp.d_s - prior.mse(fp.a_s));

    std::size_t iters_low = 0;
    const double d_low = fixed_point_sweep(model, prior, sigma2, 1e-6, options, iters_low);
    if (std::abs(d_low - fp.d_s) > 1e-6 * std::max(1.0, fp.d_s)) fp.second_d_s = d_low;
    return fp;
}

ConvolutionKernel build_convolution_kernel(const TapSchedule& schedule) {
    const std::size_t n = schedule.T + 1;
    ConvolutionKernel kernel;
    kernel.T = schedule.T;
    kernel.memory = detail::memory_kernel<double>(schedule.p.coeffs(),
                                                  schedule.q.coeffs(),
                                                  schedule.r.coeffs(), n)
                        .v;
    kernel.correlation =
        detail::correlation_kernel<double>(schedule.p.coeffs(), schedule.r.coeffs(), n).v;
    kernel.noise =
        detail::noise_kernel<double>(schedule.q.coeffs(), schedule.theta.coeffs(), n).v;
    return kernel;
}

SeState solve_camp_se(const TapSchedule& schedule, const ScalarPrior& prior,
                      double sigma2, std::size_t T, double zeta) {
    if (schedule.T < T)
        throw std::invalid_argument("solve_camp_se: schedule horizon below T");
    if (!(zeta > 0.0 && zeta <= 1.0))
        throw std::invalid_argument("solve_camp_se: zeta must lie in (0, 1]");
    if (!(sigma2 >= 0.0))
        throw std::invalid_argument("solve_camp_se: sigma2 must be nonnegative");

    const ConvolutionKernel kernel = build_convolution_kernel(schedule);
    const std::size_t n = T + 1;
    const double pivot = kernel.memory_at(0, 0);
    if (std::abs(pivot) < 1e-14) {
        std::ostringstream msg;
        msg << "solve_camp_se: singular pivot, |memory(0,0)| = " << std::abs(pivot);
        throw NumericalError(msg.str());
    }

    SeState st;
    st.T = T;
    st.sigma2 = sigma2;
    st.zeta = zeta;
    st.a.assign(n * n, 0.0);
    st.d.assign(n * n, 0.0);
    st.xi_bar.assign(T, 0.0);
    auto A = [&](std::size_t i, std::size_t j) -> double& { return st.a[i * n + j]; };
    auto D = [&](std::size_t i, std::size_t j) -> double& { return st.d[i * n + j]; };

    // Prefix sums of log xi_bar; the forgetting factors
    // xi_{t-tau}^{(t-1)} = exp(L[t] - L[t-tau]) span hundreds of orders of
    // magnitude over long horizons, so they are never formed as running
    // products.
    std::vector<double> log_xi_prefix(n, 0.0);
    auto xi_product = [&](std::size_t upto, std::size_t from) {
        return std::exp(log_xi_prefix[upto] - log_xi_prefix[from]);
    };

    D(0, 0) = 1.0;
    A(0, 0) = (kernel.correlation_at(0, 0) * 1.0 + sigma2 * kernel.noise_at(0, 0)) / pivot;
    st.last_valid_t = 0;
    if (!(std::isfinite(A(0, 0)) && A(0, 0) > 0.0)) {
        st.diverged = true;
        return st;
    }

    for (std::size_t t = 0; t < T; ++t) {
        try {
            const double att = A(t, t);
            const double xi_raw = prior.xi_bar(att);
            const double xi_prev = t > 0 ? st.xi_bar[t - 1] : 0.0;
            const double xi = zeta * xi_raw + (1.0 - zeta) * xi_prev;
            if (!(std::isfinite(xi) && xi > 0.0))
                throw NumericalError("solve_camp_se: nonpositive effective derivative");
            st.xi_bar[t] = xi;
            log_xi_prefix[t + 1] = log_xi_prefix[t] + std::log(xi);

            // d-column t+1: boundary entry, interior correlations, diagonal.
            const double bc = prior.boundary_correlation(att);
            D(0, t + 1) = D(t + 1, 0) = zeta * bc + (1.0 - zeta) * D(0, t);
            for (std::size_t tau = 1; tau <= t; ++tau) {
                NoisePairCov cov;
                cov.var_first = A(tau - 1, tau - 1);
                cov.var_second = att;
                cov.cross = A(tau - 1, t);
                const double corr = prior.correlation(cov);
                D(tau, t + 1) = D(t + 1, tau) = zeta * corr + (1.0 - zeta) * D(tau - 1, t);
            }
            D(t + 1, t + 1) = zeta * prior.mse(att) + (1.0 - zeta) * D(t, t);

            // a-column t+1 in the order tau = 0..t+1, pivoting on (0,0).
            for (std::size_t tau = 0; tau <= t + 1; ++tau) {
                double rhs = 0.0;
                for (std::size_t sp = 0; sp <= tau; ++sp) {
                    const double f1 = xi_product(tau, tau - sp);
                    if (f1 == 0.0) continue;
                    for (std::size_t s = 0; s <= t + 1; ++s) {
                        const double f = f1 * xi_product(t + 1, t + 1 - s);
                        if (f == 0.0) continue;
                        const double wd = kernel.correlation_at(sp, s);
                        const double wn = kernel.noise_at(sp, s);
                        double cell = wd * D(tau - sp, t + 1 - s) + sigma2 * wn;
                        if (!(sp == 0 && s == 0))
                            cell -= kernel.memory_at(sp, s) * A(tau - sp, t + 1 - s);
                        rhs += f * cell;
                    }
                }
                A(tau, t + 1) = A(t + 1, tau) = rhs / pivot;
            }

            const double new_diag = A(t + 1, t + 1);
            if (!(std::isfinite(new_diag) && new_diag > 0.0))
                throw NumericalError("solve_camp_se: nonpositive pre-denoising variance");
            st.last_valid_t = t + 1;
        } catch (const std::exception&) {
            // Instability is an expected regime (large condition numbers);
            // flag it and keep the table filled so far.
            st.diverged = true;
            break;
        }
    }
    return st;
}

AmpSeTrace solve_amp_se(const ScalarPrior& prior, double sigma2, double delta,
                        std::size_t T) {
    if (!(sigma2 >= 0.0))
        throw std::invalid_argument("solve_amp_se: sigma2 must be nonnegative");
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("solve_amp_se: delta must lie in (0, 1]");
    AmpSeTrace tr;
    tr.v.resize(T + 1);
    tr.mmse.resize(T + 1);
    double prev_mmse = 1.0;  // MMSE(v_{-1}) = 1
    for (std::size_t t = 0; t <= T; ++t) {
        tr.v[t] = sigma2 + prev_mmse / delta;
        tr.mmse[t] = tr.v[t] > 1e-300 ? prior.mse(tr.v[t]) : 0.0;
        prev_mmse = tr.mmse[t];
    }
    return tr;
}

OampSeTrace solve_oamp_se(const SpectralModel& model, const ScalarPrior& prior,
                          double sigma2, std::size_t T, double zeta) {
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("solve_oamp_se: sigma2 must be positive");
    if (!(zeta > 0.0 && zeta <= 1.0))
        throw std::invalid_argument("solve_oamp_se: zeta must lie in (0, 1]");
    OampSeTrace tr;
    tr.v_ba.resize(T + 1);
    tr.v_ab.resize(T);
    tr.gamma_bar.resize(T);
    tr.mse.resize(T);
    tr.v_ba[0] = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
        const double v = tr.v_ba[t];
        const double gamma = v / (1.0 - eta(model, v / sigma2));
        tr.gamma_bar[t] = gamma;
        const double v_ab = gamma - v;
        if (!(v_ab > 0.0)) {
            std::ostringstream msg;
            msg << "solve_oamp_se: nonpositive A->B variance " << v_ab
                << " at iteration " << t;
            throw NumericalError(msg.str());
        }
        tr.v_ab[t] = v_ab;
        const double m = prior.mse(v_ab);
        tr.mse[t] = m;
        const double inv_next = 1.0 / m - 1.0 / v_ab;
        if (!(inv_next > 0.0)) {
            std::ostringstream msg;
            msg << "solve_oamp_se: nonpositive B->A precision at iteration " << t;
            throw NumericalError(msg.str());
        }
        tr.v_ba[t + 1] = zeta * (1.0 / inv_next) + (1.0 - zeta) * v;
    }
    return tr;
}

}  // namespace camp
