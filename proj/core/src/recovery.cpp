#include "camp/recovery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "camp/errors.hpp"
#include "camp/rng.hpp"

namespace camp {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double norm2_diff(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x * (1.0 / std::numbers::sqrt2)); }

}  // namespace

void fwht(std::span<double> v) {
    const std::size_t n = v.size();
    if (!is_power_of_two(n))
        throw std::invalid_argument("fwht: length must be a power of two");
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += h << 1) {
            for (std::size_t j = i; j < i + h; ++j) {
                const double a = v[j];
                const double b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (double& x : v) x *= scale;
}

void SensingInstance::apply(std::span<const double> v, std::span<double> y,
                            std::span<double> scratch) const {
    if (structured()) {
        std::copy(v.begin(), v.end(), scratch.begin());
        fwht(scratch);
        for (std::size_t m = 0; m < M; ++m)
            y[m] = singular_values[m] * scratch[row_permutation[m]];
    } else {
        for (std::size_t m = 0; m < M; ++m) {
            double acc = 0.0;
            const double* row = dense.data() + m * N;
            for (std::size_t n = 0; n < N; ++n) acc += row[n] * v[n];
            y[m] = acc;
        }
    }
}

void SensingInstance::apply_adjoint(std::span<const double> w,
                                    std::span<double> u) const {
    if (structured()) {
        std::fill(u.begin(), u.end(), 0.0);
        for (std::size_t m = 0; m < M; ++m)
            u[row_permutation[m]] = singular_values[m] * w[m];
        fwht(u);
    } else {
        std::fill(u.begin(), u.end(), 0.0);
        for (std::size_t m = 0; m < M; ++m) {
            const double wm = w[m];
            const double* row = dense.data() + m * N;
            for (std::size_t n = 0; n < N; ++n) u[n] += row[n] * wm;
        }
    }
}

void SensingInstance::apply_gram(std::span<const double> w, std::span<double> out,
                                 std::span<double> scratch) const {
    if (structured()) {
        // A A^T = diag(sigma_m^2) for the construction SVD.
        for (std::size_t m = 0; m < M; ++m)
            out[m] = singular_values[m] * singular_values[m] * w[m];
    } else {
        apply_adjoint(w, scratch);
        // reuse out as the target of the forward pass; needs its own scratch
        std::vector<double> tmp(N);
        apply(scratch, out, tmp);
    }
}

SensingInstance build_sensing(EnsembleKind kind, std::size_t M, std::size_t N,
                              std::uint64_t seed, double kappa, double gamma) {
    if (M == 0 || N == 0 || M > N)
        throw std::invalid_argument("build_sensing: need 0 < M <= N");
    SensingInstance A;
    A.kind = kind;
    A.M = M;
    A.N = N;
    A.delta = static_cast<double>(M) / static_cast<double>(N);
    A.kappa = kappa;
    A.gamma = gamma;
    Rng rng(seed);

    if (kind == EnsembleKind::iid_gaussian) {
        if (!(gamma >= 0.0 && gamma < 1.0))
            throw std::invalid_argument("build_sensing: gamma must lie in [0, 1)");
        const double mean = std::sqrt(gamma / static_cast<double>(M));
        const double sd = std::sqrt((1.0 - gamma) / static_cast<double>(M));
        A.dense.resize(M * N);
        for (double& a : A.dense) a = rng.normal(mean, sd);
        return A;
    }

    if (!is_power_of_two(N))
        throw std::invalid_argument(
            "build_sensing: N must be a power of two for the Hadamard factor");
    A.singular_values.resize(M);
    if (kind == EnsembleKind::row_orthogonal) {
        const double s = std::sqrt(1.0 / A.delta);
        std::fill(A.singular_values.begin(), A.singular_values.end(), s);
    } else {
        if (!(kappa > 1.0))
            throw std::invalid_argument(
                "build_sensing: geometric kind needs kappa > 1 (use row_orthogonal)");
        if (M < 2) throw std::invalid_argument("build_sensing: geometric kind needs M >= 2");
        // sigma_m = sigma_0 kappa^{-m/(M-1)},
        // sigma_0^2 = N (1 - kappa^{-2/(M-1)}) / (1 - kappa^{-2M/(M-1)}).
        const double log_kappa = std::log(kappa);
        const double e1 = -std::expm1(-2.0 * log_kappa / static_cast<double>(M - 1));
        const double eM = -std::expm1(-2.0 * log_kappa * static_cast<double>(M) /
                                      static_cast<double>(M - 1));
        const double sigma0 = std::sqrt(static_cast<double>(N) * e1 / eM);
        for (std::size_t m = 0; m < M; ++m)
            A.singular_values[m] =
                sigma0 * std::exp(-log_kappa * static_cast<double>(m) /
                                  static_cast<double>(M - 1));
    }
    // Fisher-Yates over all N indices; the first M slots pick the rows that
    // carry the non-zero singular values.
    A.row_permutation.resize(N);
    std::iota(A.row_permutation.begin(), A.row_permutation.end(), 0u);
    for (std::size_t i = N - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
        std::swap(A.row_permutation[i], A.row_permutation[j]);
    }
    return A;
}

Instance generate_instance(const BernoulliGaussianPrior& prior, double sigma2,
                           const SensingInstance& A, std::uint64_t seed) {
    if (!(sigma2 >= 0.0))
        throw std::invalid_argument("generate_instance: sigma2 must be nonnegative");
    Rng rng(seed);
    Instance inst;
    inst.x.resize(A.N);
    const double comp_sd = std::sqrt(1.0 / prior.rho());
    for (double& v : inst.x) {
        const double u = rng.uniform();
        v = u < prior.rho() ? rng.normal(0.0, comp_sd) : 0.0;
    }
    inst.w.resize(A.M);
    const double noise_sd = std::sqrt(sigma2);
    for (double& v : inst.w) v = rng.normal(0.0, noise_sd);
    inst.y.resize(A.M);
    std::vector<double> scratch(A.N);
    A.apply(inst.x, inst.y, scratch);
    for (std::size_t m = 0; m < A.M; ++m) inst.y[m] += inst.w[m];
    return inst;
}

GaussianityStats compute_gaussianity(std::span<const double> values) {
    const std::size_t n = values.size();
    GaussianityStats stats;
    if (n < 2) return stats;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double c = v - mean;
        const double c2 = c * c;
        m2 += c2;
        m3 += c2 * c;
        m4 += c2 * c2;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    const double sd = std::sqrt(m2);
    stats.skewness = m3 / (m2 * sd);
    stats.excess_kurtosis = m4 / (m2 * m2) - 3.0;

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = (sorted[i] - mean) / sd;
        const double cdf = standard_normal_cdf(z);
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        ks = std::max(ks, std::max(std::abs(cdf - lo), std::abs(hi - cdf)));
    }
    stats.ks_statistic = ks;
    return stats;
}

RunTrace run_camp(const std::vector<double>& y, const SensingInstance& A,
                  const TapSchedule& schedule, const SeState& se,
                  const ScalarPrior& prior, std::size_t T,
                  const std::vector<double>& true_x, const CampRunOptions& options) {
    if (schedule.T < T || se.T < T)
        throw std::invalid_argument("run_camp: schedule/SE horizon below T");
    if (!(options.zeta > 0.0 && options.zeta <= 1.0))
        throw std::invalid_argument("run_camp: zeta must lie in (0, 1]");
    const std::size_t M = A.M;
    const std::size_t N = A.N;
    const double zeta = options.zeta;

    RunTrace trace;
    trace.mse.resize(T + 1);
    trace.xi.resize(T, 0.0);
    trace.iter_seconds.resize(T, 0.0);

    std::vector<double> x(N, 0.0);
    std::vector<double> u(N);        // x_t + A^T z_t
    std::vector<double> z(M);
    std::vector<double> scratch(N);
    std::vector<std::vector<double>> z_hist;
    std::vector<std::vector<double>> gram_hist;  // A A^T z_tau
    std::vector<double> xi_col;                  // xi_tau^{(t-1)} for tau < t
    z_hist.reserve(T);
    gram_hist.reserve(T);

    trace.mse[0] = norm2_diff(x, true_x) / static_cast<double>(N);
    double xi_prev = 0.0;

    for (std::size_t t = 0; t < T; ++t) {
        const auto t0 = std::chrono::steady_clock::now();

        // z_t = y - A x_t + sum_tau xi_tau^{(t-1)} (theta_{t-tau} A A^T - g_{t-tau} I) z_tau
        A.apply(x, z, scratch);
        for (std::size_t m = 0; m < M; ++m) z[m] = y[m] - z[m];
        for (std::size_t tau = 0; tau < t; ++tau) {
            const double prod = xi_col[tau];
            const double ctheta = prod * schedule.theta.at(static_cast<long>(t - tau));
            const double cg = prod * schedule.g.at(static_cast<long>(t - tau));
            if (ctheta != 0.0) {
                const double* gz = gram_hist[tau].data();
                for (std::size_t m = 0; m < M; ++m) z[m] += ctheta * gz[m];
            }
            if (cg != 0.0) {
                const double* zt = z_hist[tau].data();
                for (std::size_t m = 0; m < M; ++m) z[m] -= cg * zt[m];
            }
        }

        A.apply_adjoint(z, u);
        for (std::size_t n = 0; n < N; ++n) u[n] += x[n];

        if (options.record_gaussianity) {
            std::vector<double> h(N);
            for (std::size_t n = 0; n < N; ++n) h[n] = u[n] - true_x[n];
            trace.gaussianity.push_back(compute_gaussianity(h));
        }

        const double a_t = se.a_diag(t);
        double xi_raw = 0.0;
        for (std::size_t n = 0; n < N; ++n) xi_raw += prior.f_opt_deriv(u[n], a_t);
        xi_raw /= static_cast<double>(N);
        const double xi_t = options.xi_mode == XiMode::empirical
                                ? zeta * xi_raw + (1.0 - zeta) * xi_prev
                                : se.xi_bar[t];
        trace.xi[t] = xi_t;

        for (std::size_t n = 0; n < N; ++n)
            x[n] = zeta * prior.f_opt(u[n], a_t) + (1.0 - zeta) * x[n];

        trace.mse[t + 1] = norm2_diff(x, true_x) / static_cast<double>(N);
        if (!std::isfinite(trace.mse[t + 1])) {
            trace.diverged = true;
            trace.last_valid_t = t;
            trace.mse.resize(t + 2);
            trace.xi.resize(t + 1);
            break;
        }
        trace.last_valid_t = t + 1;
        if (options.record_iterates) trace.iterates.push_back(x);

        // Retain z_t and A A^T z_t; update the xi-product column.
        gram_hist.emplace_back(M);
        A.apply_gram(z, gram_hist.back(), scratch);
        z_hist.push_back(std::move(z));
        z = std::vector<double>(M);
        for (double& c : xi_col) c *= xi_t;
        xi_col.push_back(xi_t);
        xi_prev = xi_t;

        trace.iter_seconds[t] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    trace.x_final = std::move(x);
    trace.peak_workspace_scalars = 3 * N + (2 * z_hist.size() + 1) * M +
                                   xi_col.size() +
                                   (A.structured() ? A.M + A.N : A.M * A.N);
    return trace;
}

RunTrace run_amp(const std::vector<double>& y, const SensingInstance& A,
                 const ScalarPrior& prior, const AmpSeTrace& se, std::size_t T,
                 const std::vector<double>& true_x, const AmpRunOptions& options) {
    if (se.v.size() < T)
        throw std::invalid_argument("run_amp: SE trace shorter than T");
    if (!(options.zeta > 0.0 && options.zeta <= 1.0))
        throw std::invalid_argument("run_amp: zeta must lie in (0, 1]");
    const std::size_t M = A.M;
    const std::size_t N = A.N;
    const double zeta = options.zeta;
    const double inv_delta = 1.0 / A.delta;

    RunTrace trace;
    trace.mse.resize(T + 1);
    trace.xi.resize(T, 0.0);
    trace.iter_seconds.resize(T, 0.0);

    std::vector<double> x(N, 0.0);
    std::vector<double> u(N);
    std::vector<double> z(M, 0.0);
    std::vector<double> z_prev(M, 0.0);
    std::vector<double> scratch(N);
    trace.mse[0] = norm2_diff(x, true_x) / static_cast<double>(N);
    double xi_prev = 0.0;
    bool have_prev = false;

    for (std::size_t t = 0; t < T; ++t) {
        const auto t0 = std::chrono::steady_clock::now();
        A.apply(x, z, scratch);
        for (std::size_t m = 0; m < M; ++m) z[m] = y[m] - z[m];
        if (have_prev) {
            const double c = xi_prev * inv_delta;
            for (std::size_t m = 0; m < M; ++m) z[m] += c * z_prev[m];
        }
        A.apply_adjoint(z, u);
        for (std::size_t n = 0; n < N; ++n) u[n] += x[n];

        const double v_t = se.v[t];
        double xi_t;
        if (options.xi_mode == XiMode::empirical) {
            double xi_raw = 0.0;
            for (std::size_t n = 0; n < N; ++n) xi_raw += prior.f_opt_deriv(u[n], v_t);
            xi_raw /= static_cast<double>(N);
            xi_t = zeta * xi_raw + (1.0 - zeta) * xi_prev;
        } else {
            xi_t = se.mmse[t] / se.v[t];
        }
        trace.xi[t] = xi_t;

        for (std::size_t n = 0; n < N; ++n)
            x[n] = zeta * prior.f_opt(u[n], v_t) + (1.0 - zeta) * x[n];
        trace.mse[t + 1] = norm2_diff(x, true_x) / static_cast<double>(N);
        if (!std::isfinite(trace.mse[t + 1])) {
            trace.diverged = true;
            trace.last_valid_t = t;
            break;
        }
        trace.last_valid_t = t + 1;
        if (options.record_iterates) trace.iterates.push_back(x);
        std::swap(z_prev, z);
        have_prev = true;
        xi_prev = xi_t;
        trace.iter_seconds[t] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    trace.x_final = std::move(x);
    trace.peak_workspace_scalars =
        3 * N + 3 * M + (A.structured() ? A.M + A.N : A.M * A.N);
    return trace;
}

RunTrace run_oamp_vamp(const std::vector<double>& y, const SensingInstance& A,
                       const ScalarPrior& prior, const OampSeTrace& se,
                       double sigma2, std::size_t T,
                       const std::vector<double>& true_x,
                       const OampRunOptions& options) {
    if (se.v_ab.size() < T)
        throw std::invalid_argument("run_oamp_vamp: SE trace shorter than T");
    if (!(options.zeta > 0.0 && options.zeta <= 1.0))
        throw std::invalid_argument("run_oamp_vamp: zeta must lie in (0, 1]");
    if (!A.structured())
        throw std::invalid_argument(
            "run_oamp_vamp: needs the construction SVD (structured instance)");
    const std::size_t M = A.M;
    const std::size_t N = A.N;
    const double zeta = options.zeta;

    RunTrace trace;
    trace.mse.resize(T + 1);
    trace.iter_seconds.resize(T, 0.0);

    std::vector<double> x_ba(N, 0.0);
    std::vector<double> x_ab(N);
    std::vector<double> xhat(N);
    std::vector<double> r(M);
    std::vector<double> scratch(N);
    trace.mse[0] = norm2_diff(x_ba, true_x) / static_cast<double>(N);

    for (std::size_t t = 0; t < T; ++t) {
        const auto t0 = std::chrono::steady_clock::now();
        const double v_ba = se.v_ba[t];

        // gamma_t from the instance spectrum; W_t is diagonal in the U basis.
        double trace_sum = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            const double s2 = A.singular_values[m] * A.singular_values[m];
            trace_sum += s2 / (sigma2 + v_ba * s2);
        }
        const double gamma_t = static_cast<double>(N) / trace_sum;

        A.apply(x_ba, r, scratch);
        for (std::size_t m = 0; m < M; ++m) {
            const double s2 = A.singular_values[m] * A.singular_values[m];
            r[m] = (y[m] - r[m]) / (sigma2 + v_ba * s2);
        }
        A.apply_adjoint(r, x_ab);
        for (std::size_t n = 0; n < N; ++n) x_ab[n] = x_ba[n] + gamma_t * x_ab[n];

        const double v_ab = se.v_ab[t];
        const double mmse = se.mse[t];
        for (std::size_t n = 0; n < N; ++n) xhat[n] = prior.f_opt(x_ab[n], v_ab);
        trace.mse[t + 1] = norm2_diff(xhat, true_x) / static_cast<double>(N);
        if (!std::isfinite(trace.mse[t + 1])) {
            trace.diverged = true;
            trace.last_valid_t = t;
            break;
        }
        trace.last_valid_t = t + 1;
        if (options.record_iterates) trace.iterates.push_back(xhat);

        const double inv_next = 1.0 / mmse - 1.0 / v_ab;
        if (!(inv_next > 0.0)) {
            trace.diverged = true;
            break;
        }
        const double v_next = 1.0 / inv_next;
        for (std::size_t n = 0; n < N; ++n) {
            const double msg = v_next * (xhat[n] / mmse - x_ab[n] / v_ab);
            x_ba[n] = zeta * msg + (1.0 - zeta) * x_ba[n];
        }
        trace.iter_seconds[t] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    trace.x_final = std::move(xhat);
    trace.peak_workspace_scalars = 4 * N + 2 * M + A.M + A.N;
    return trace;
}

}  // namespace camp
