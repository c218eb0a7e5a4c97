#include "camp/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace camp {

namespace {

void check_variance(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("denoiser: variance must be positive");
}

double log_normal_pdf(double y, double variance) {
    return -0.5 * y * y / variance -
           0.5 * std::log(2.0 * std::numbers::pi * variance);
}

double normal_pdf(double y, double variance) {
    return std::exp(log_normal_pdf(y, variance));
}

}  // namespace

// Gauss-Legendre rule on [-1, 1] by Newton iteration on the recurrence.
GaussLegendreRule gauss_legendre(std::size_t n) {
    if (n == 0) throw std::invalid_argument("gauss_legendre: order must be positive");
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / static_cast<double>(j);
            }
            pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

namespace {

// The posterior odds ln[(1-rho) N(y; a) / (rho N(y; 1/rho + a))] are linear
// in y^2: s(y) = s0 - c1 y^2. The spike posterior pi is a logistic in s, so
// every expectation integrand has a boundary layer of width O(1/(c1 y)).
// Quadrature panels are pinned to the layer through these descriptors.
struct OddsTransition {
    double s0 = 0.0;
    double c1 = 0.0;

    // |y| at odds level s (clamped to 0 when unreachable).
    double y_at(double s) const {
        return std::sqrt(std::max(s0 - s, 0.0) / c1);
    }
};

OddsTransition make_transition(double rho, double a) {
    OddsTransition tr;
    tr.c1 = 0.5 * (1.0 / a - 1.0 / (1.0 / rho + a));
    tr.s0 = std::log((1.0 - rho) / rho) + 0.5 * std::log((1.0 / rho + a) / a);
    return tr;
}

constexpr double kOddsSpan = 36.0;  // logistic saturates to ~1e-16 beyond this

void append_transition_breaks(const OddsTransition& tr, double scale,
                              std::vector<double>& breaks) {
    const double hi = tr.y_at(-kOddsSpan);
    if (hi <= 0.0) return;
    breaks.push_back(tr.y_at(kOddsSpan) * scale);
    breaks.push_back(tr.y_at(0.0) * scale);
    breaks.push_back(hi * scale);
}

std::vector<double> clean_breaks(std::vector<double> breaks, double lo, double hi) {
    breaks.push_back(lo);
    breaks.push_back(hi);
    for (double& b : breaks) b = std::clamp(b, lo, hi);
    std::sort(breaks.begin(), breaks.end());
    std::vector<double> out;
    const double tol = 1e-12 * (std::abs(lo) + std::abs(hi) + 1.0);
    for (double b : breaks)
        if (out.empty() || b - out.back() > tol) out.push_back(b);
    if (out.size() < 2) out = {lo, hi};
    return out;
}

template <typename F>
double integrate_panels(const std::vector<double>& breaks,
                        const GaussLegendreRule& rule, F&& f) {
    double acc = 0.0;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double mid = 0.5 * (breaks[p] + breaks[p + 1]);
        const double half = 0.5 * (breaks[p + 1] - breaks[p]);
        double panel = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            panel += rule.weights[i] * f(mid + half * rule.nodes[i]);
        acc += half * panel;
    }
    return acc;
}

}  // namespace

// Gauss-Hermite is kept as a public primitive (physicists' weight e^{-x^2});
// smooth-integrand expectations in client and test code use it.
GaussHermiteRule gauss_hermite(std::size_t order) {
    if (order == 0) throw std::invalid_argument("gauss_hermite: order must be positive");
    const std::size_t n = order;
    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t m = (n + 1) / 2;
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) -
                1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[1];
        } else {
            z = 2.0 * z - rule.nodes[i - 2];
        }
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pim4;
            double p2 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) <= 1e-15 * (1.0 + std::abs(z))) break;
        }
        rule.nodes[i] = z;
        rule.nodes[n - 1 - i] = -z;
        rule.weights[i] = 2.0 / (pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

BernoulliGaussianPrior::BernoulliGaussianPrior(double rho, std::size_t order_1d,
                                               std::size_t order_2d)
    : rho_(rho),
      marginal_rule_(gauss_legendre(order_1d)),
      outer_rule_(gauss_legendre(order_2d + 4)),
      inner_rule_(gauss_legendre(order_2d)) {
    if (!(rho > 0.0 && rho <= 1.0))
        throw std::invalid_argument("BernoulliGaussianPrior: rho must lie in (0, 1]");
}

double BernoulliGaussianPrior::spike_posterior(double y, double a) const {
    check_variance(a);
    if (rho_ >= 1.0) return 1.0;
    const double log_wide = std::log(rho_) + log_normal_pdf(y, 1.0 / rho_ + a);
    const double log_narrow = std::log1p(-rho_) + log_normal_pdf(y, a);
    const double diff = log_narrow - log_wide;
    if (diff > 700.0) return 0.0;
    return 1.0 / (1.0 + std::exp(diff));
}

double BernoulliGaussianPrior::f_opt(double y, double a) const {
    check_variance(a);
    return y / (1.0 + rho_ * a) * spike_posterior(y, a);
}

double BernoulliGaussianPrior::f_opt_deriv(double y, double a) const {
    check_variance(a);
    const double pi = spike_posterior(y, a);
    const double scale = 1.0 + rho_ * a;
    return (pi + pi * (1.0 - pi) * y * y / (a * scale)) / scale;
}

template <typename F>
double BernoulliGaussianPrior::expect_marginal(double a, F&& integrand) const {
    // 2 * int_0^inf h(y) p_GM(y) dy for even h, on Gauss-Legendre panels
    // split at the posterior-odds transition and at the two Gaussian scales.
    const GaussLegendreRule& rule = marginal_rule_;
    const double sd_wide = std::sqrt(1.0 / rho_ + a);
    const double sd_narrow = std::sqrt(a);
    const double ymax = 9.5 * sd_wide;
    std::vector<double> breaks;
    breaks.reserve(16);
    if (rho_ < 1.0) append_transition_breaks(make_transition(rho_, a), 1.0, breaks);
    for (double k : {1.0, 3.0, 6.0}) {
        breaks.push_back(k * sd_narrow);
        breaks.push_back(k * sd_wide);
    }
    breaks = clean_breaks(std::move(breaks), 0.0, ymax);
    const double weight_wide = rho_;
    const double weight_narrow = 1.0 - rho_;
    return 2.0 * integrate_panels(breaks, rule, [&](double y) {
        const double density = weight_wide * normal_pdf(y, 1.0 / rho_ + a) +
                               (weight_narrow > 0.0
                                    ? weight_narrow * normal_pdf(y, a)
                                    : 0.0);
        return density * integrand(y);
    });
}

double BernoulliGaussianPrior::mse(double a) const {
    check_variance(a);
    // MSE(a) = rho a/(1 + rho a) + E[y^2 pi (1 - pi)] / (1 + rho a)^2.
    // First term: E[pi] = rho times the active-branch posterior variance
    // a/(1 + rho a); the remainder collapses (1-pi) f^2 + pi (y/(1+rho a) - f)^2
    // using f = y pi/(1+rho a). Equivalent to 1 - E[pi^2 y^2]/(1+rho a)^2 by
    // the orthogonality of the posterior mean.
    const double scale = 1.0 + rho_ * a;
    const double correction = expect_marginal(a, [&](double y) {
        const double pi = spike_posterior(y, a);
        return y * y * pi * (1.0 - pi);
    });
    return rho_ * a / scale + correction / (scale * scale);
}

double BernoulliGaussianPrior::xi_bar(double a) const {
    check_variance(a);
    return expect_marginal(a, [&](double y) { return f_opt_deriv(y, a); });
}

double BernoulliGaussianPrior::correlation(const NoisePairCov& cov) const {
    const double a1 = cov.var_first;
    const double a2 = cov.var_second;
    const double c = cov.cross;
    check_variance(a1);
    check_variance(a2);
    const double denom = a1 + a2 - 2.0 * c;
    if (denom < 1e-12) {
        // The sufficient statistic collapses to a single observation.
        return mse(0.5 * (a1 + a2));
    }
    if (!(a1 * a2 - c * c > 0.0) && std::abs(a1 * a2 - c * c) > 1e-15 * a1 * a2)
        throw std::invalid_argument("correlation: covariance is not positive definite");

    const double det = std::max(a1 * a2 - c * c, 0.0);
    const double v = det / denom;  // variance of the matched-filter noise
    const double inv_rho = 1.0 / rho_;
    const double scale_v = 1.0 + rho_ * v;
    const double w1 = (a2 - c) / denom;  // Y_s = w1 Y1 + w2 Y2
    const double w2 = (a1 - c) / denom;

    auto integrand = [&](double y1, double y2) {
        const double ys = w1 * y1 + w2 * y2;
        const double pv = spike_posterior(ys, v);
        const double fa = f_opt(y1, a1);
        const double fb = f_opt(y2, a2);
        const double pme = ys / scale_v;
        return fa * fb +
               pv * (pme * pme + inv_rho * v / (inv_rho + v) - pme * (fa + fb));
    };

    const GaussLegendreRule& outer_rule = outer_rule_;
    const GaussLegendreRule& inner_rule = inner_rule_;
    const bool have_spike = rho_ < 1.0;
    const OddsTransition tr1 = have_spike ? make_transition(rho_, a1) : OddsTransition{};
    const OddsTransition tr2 = have_spike ? make_transition(rho_, a2) : OddsTransition{};
    const OddsTransition trv = have_spike ? make_transition(rho_, v) : OddsTransition{};

    // Joint pdf per mixture branch: p(y1) p(y2 | y1), both Gaussian. The
    // double integral is even under (y1, y2) -> (-y1, -y2), so the outer
    // integral runs over y1 >= 0 and is doubled.
    double result = 0.0;
    for (int branch = 0; branch < 2; ++branch) {
        const double weight = branch == 1 ? rho_ : 1.0 - rho_;
        if (weight <= 0.0) continue;
        const double shift = branch == 1 ? inv_rho : 0.0;
        const double s1 = shift + a1;
        const double slope = (shift + c) / s1;
        const double resid = std::max(shift + a2 - (shift + c) * (shift + c) / s1, 0.0);
        const double sd1 = std::sqrt(s1);
        const double sd2 = std::sqrt(resid);

        std::vector<double> outer_breaks;
        outer_breaks.reserve(12);
        if (have_spike) append_transition_breaks(tr1, 1.0, outer_breaks);
        for (double k : {1.0, 3.0, 6.0}) outer_breaks.push_back(k * sd1);
        outer_breaks = clean_breaks(std::move(outer_breaks), 0.0, 9.5 * sd1);

        std::vector<double> inner_breaks;
        const double branch_acc = integrate_panels(outer_breaks, outer_rule, [&](double y1) {
            const double mean2 = slope * y1;
            if (!(sd2 > 0.0)) return normal_pdf(y1, s1) * integrand(y1, mean2);
            const double lo = mean2 - 9.5 * sd2;
            const double hi = mean2 + 9.5 * sd2;
            inner_breaks.clear();
            if (have_spike) {
                // f_opt(y2; a2) layer at |y2| near the tr2 transition
                for (double s : {kOddsSpan, 0.0, -kOddsSpan}) {
                    const double b = tr2.y_at(s);
                    inner_breaks.push_back(b);
                    inner_breaks.push_back(-b);
                }
                // spike_posterior(ys; v) layer mapped to y2 given y1
                if (std::abs(w2) * (std::abs(lo) + std::abs(hi)) >
                    1e-9 * (1.0 + std::abs(w1 * y1))) {
                    for (double s : {kOddsSpan, 0.0, -kOddsSpan}) {
                        const double b = trv.y_at(s);
                        inner_breaks.push_back((b - w1 * y1) / w2);
                        inner_breaks.push_back((-b - w1 * y1) / w2);
                    }
                }
            }
            for (double k : {3.0, 6.0}) {
                inner_breaks.push_back(mean2 - k * sd2);
                inner_breaks.push_back(mean2 + k * sd2);
            }
            inner_breaks = clean_breaks(std::move(inner_breaks), lo, hi);
            const double inner = integrate_panels(inner_breaks, inner_rule, [&](double y2) {
                return normal_pdf(y2 - mean2, resid) * integrand(y1, y2);
            });
            return normal_pdf(y1, s1) * inner;
        });
        result += 2.0 * weight * branch_acc;
    }
    return result;
}

double BernoulliGaussianPrior::boundary_correlation(double a) const {
    // -E[x (f_opt - x)] = mse for the posterior mean (orthogonality).
    return mse(a);
}

}  // namespace camp
