#include "camp/spectra.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "camp/detail/moments.hpp"

namespace camp {

std::string to_string(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::iid_gaussian: return "iid_gaussian";
        case EnsembleKind::row_orthogonal: return "row_orthogonal";
        case EnsembleKind::geometric: return "geometric";
    }
    return "unknown";
}

SpectralModel SpectralModel::iid_gaussian(double delta, std::size_t max_order,
                                          double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("SpectralModel: gamma must lie in [0, 1)");
    SpectralModel m;
    m.kind = EnsembleKind::iid_gaussian;
    m.delta = delta;
    m.gamma = gamma;
    m.moments = moments_iid_gaussian(delta, max_order);
    return m;
}

SpectralModel SpectralModel::row_orthogonal(double delta, std::size_t max_order) {
    SpectralModel m;
    m.kind = EnsembleKind::row_orthogonal;
    m.delta = delta;
    m.moments = moments_row_orthogonal(delta, max_order);
    return m;
}

SpectralModel SpectralModel::geometric(double kappa, double delta,
                                       std::size_t max_order) {
    SpectralModel m;
    m.kind = EnsembleKind::geometric;
    m.delta = delta;
    m.kappa = kappa;
    m.moments = moments_geometric(kappa, delta, max_order);
    return m;
}

std::vector<double> moments_geometric(double kappa, double delta, std::size_t max_order) {
    return detail::moments_geometric_t<double>(kappa, delta, max_order);
}

std::vector<double> moments_row_orthogonal(double delta, std::size_t max_order) {
    return detail::moments_row_orthogonal_t<double>(delta, max_order);
}

std::vector<double> moments_iid_gaussian(double delta, std::size_t max_order) {
    return detail::moments_iid_gaussian_t<double>(delta, max_order);
}

double eta_geometric(double x, double kappa, double delta) {
    if (x < 0.0) throw std::domain_error("eta_geometric: x must be nonnegative");
    const double c = 2.0 * std::log(kappa) / delta;
    const double k2 = kappa * kappa;
    return 1.0 - std::log((k2 - 1.0 + k2 * c * x) / (k2 - 1.0 + c * x)) / c;
}

double eta_inverse_geometric(double u, double kappa, double delta) {
    const double c = 2.0 * std::log(kappa) / delta;
    const double k2 = kappa * kappa;
    const double e = std::exp(c * (1.0 - u));
    const double denom = k2 - e;
    // The range of eta is the open interval (1 - delta, 1]; the denominator
    // vanishes at the endpoint, so test the equivalent exact condition.
    if (!(u > 1.0 - delta) || !(denom > 0.0)) {
        std::ostringstream msg;
        msg << "eta_inverse_geometric: u = " << u
            << " is outside the eta range (" << 1.0 - delta << ", 1]";
        throw std::domain_error(msg.str());
    }
    return (k2 - 1.0) * (e - 1.0) / (c * denom);
}

namespace {

double eta_row_orthogonal(double x, double delta) {
    return 1.0 - delta + delta * delta / (delta + x);
}

// Marchenko-Pastur eta, the positive root of x eta^2 + (delta + x(delta-1)) eta
// - delta = 0, written in the cancellation-free form.
double eta_iid_gaussian(double x, double delta) {
    const double b = delta + x * (delta - 1.0);
    return 2.0 * delta / (b + std::sqrt(b * b + 4.0 * x * delta));
}

}  // namespace

double eta(const SpectralModel& model, double x) {
    if (x < 0.0) throw std::domain_error("eta: x must be nonnegative");
    switch (model.kind) {
        case EnsembleKind::iid_gaussian: return eta_iid_gaussian(x, model.delta);
        case EnsembleKind::row_orthogonal: return eta_row_orthogonal(x, model.delta);
        case EnsembleKind::geometric: return eta_geometric(x, model.kappa, model.delta);
    }
    throw std::logic_error("eta: unknown ensemble");
}

double r_transform_from_eta(const std::function<double(double)>& eta_fn, double x) {
    if (x > 0.0)
        throw std::domain_error("r_transform_from_eta: only x <= 0 is supported");
    if (x == 0.0) return 1.0;  // R(0) = mu_1 = 1
    // Find s >= 0 with s*eta(s) = -x; s*eta(s) is increasing from 0.
    const double target = -x;
    auto psi = [&](double s) { return s * eta_fn(s); };
    double lo = 0.0;
    double hi = 1.0;
    int grow = 0;
    while (psi(hi) < target) {
        lo = hi;
        hi *= 4.0;
        if (++grow > 200) {
            std::ostringstream msg;
            msg << "r_transform_from_eta: bracket growth failed for x = " << x
                << "; psi(" << lo << ") = " << psi(lo) << ", psi(" << hi
                << ") = " << psi(hi)
                << " (the argument may be outside the R-transform domain)";
            throw std::runtime_error(msg.str());
        }
    }
    for (int it = 0; it < 220; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (psi(mid) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    const double s = 0.5 * (lo + hi);
    return (eta_fn(s) - 1.0) / x;
}

double r_transform(const SpectralModel& model, double x) {
    if (model.kind == EnsembleKind::iid_gaussian) {
        if (!(x < model.delta))
            throw std::domain_error("r_transform: x must be below delta for the "
                                    "i.i.d. Gaussian ensemble");
        return model.delta / (model.delta - x);
    }
    const SpectralModel& m = model;
    return r_transform_from_eta([&m](double s) { return eta(m, s); }, x);
}

std::vector<double> moments_from_free_cumulants(const std::vector<double>& cumulants,
                                                std::size_t max_order) {
    return detail::moments_from_free_cumulants_t<double>(cumulants, max_order);
}

std::vector<double> free_cumulants_from_moments(const std::vector<double>& moments,
                                                std::size_t max_order) {
    return detail::free_cumulants_from_moments_t<double>(moments, max_order);
}

}  // namespace camp
