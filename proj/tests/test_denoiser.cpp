#include <doctest.h>

#include <cmath>
#include <functional>
#include <stdexcept>

#include "camp/denoiser.hpp"
#include "oracles.hpp"

using namespace camp;

namespace {

// E[h(Z, W)] for Z ~ N(0, 1/rho), W ~ N(0, a), by tensor Gauss-Hermite.
double expect_active(double rho, double a, const GaussHermiteRule& rule,
                     const std::function<double(double, double)>& h) {
    const double sz = std::sqrt(2.0 / rho);
    const double sw = std::sqrt(2.0 * a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j)
            inner += rule.weights[j] * h(sz * rule.nodes[i], sw * rule.nodes[j]);
        acc += rule.weights[i] * inner;
    }
    return acc / M_PI;
}

// E[h(W)] for W ~ N(0, a).
double expect_noise(double a, const GaussHermiteRule& rule,
                    const std::function<double(double)>& h) {
    const double sw = std::sqrt(2.0 * a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * h(sw * rule.nodes[i]);
    return acc / std::sqrt(M_PI);
}

}  // namespace

TEST_CASE("Gauss-Hermite rule integrates polynomial moments") {
    const auto rule = gauss_hermite(31);
    double zeroth = 0.0, second = 0.0, fourth = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        zeroth += rule.weights[i];
        second += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
        fourth += rule.weights[i] * std::pow(rule.nodes[i], 4);
    }
    const double sqrt_pi = std::sqrt(M_PI);
    CHECK(zeroth == doctest::Approx(sqrt_pi).epsilon(1e-13));
    CHECK(second == doctest::Approx(0.5 * sqrt_pi).epsilon(1e-13));
    CHECK(fourth == doctest::Approx(0.75 * sqrt_pi).epsilon(1e-12));
}

TEST_CASE("posterior mean: odd symmetry and contraction") {
    const BernoulliGaussianPrior prior(0.1);
    CHECK(prior.f_opt(0.0, 0.3) == 0.0);
    for (double y : {0.1, 1.0, 5.0, 40.0}) {
        CHECK(prior.f_opt(y, 0.3) == doctest::Approx(-prior.f_opt(-y, 0.3)));
        CHECK(std::abs(prior.f_opt(y, 0.3)) <= std::abs(y) / (1.0 + 0.1 * 0.3));
    }
    CHECK_THROWS_AS(prior.f_opt(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(prior.mse(-0.5), std::invalid_argument);
}

TEST_CASE("rho = 1 collapses to the pure-Gaussian LMMSE denoiser") {
    const BernoulliGaussianPrior prior(1.0);
    for (double y : {-2.0, 0.5, 3.0})
        for (double a : {0.1, 1.0, 4.0}) {
            CHECK(prior.f_opt(y, a) == doctest::Approx(y / (1.0 + a)).epsilon(1e-14));
            CHECK(prior.f_opt_deriv(y, a) ==
                  doctest::Approx(1.0 / (1.0 + a)).epsilon(1e-14));
        }
    CHECK(prior.mse(1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(prior.mse(0.25) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(prior.xi_bar(1.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("posterior mean against direct grid quadrature") {
    const BernoulliGaussianPrior prior(0.1);
    CHECK(prior.f_opt(1.0, 0.01) ==
          doctest::Approx(oracles::grid_posterior_mean(1.0, 0.01, 0.1)).epsilon(1e-9));
    CHECK(prior.f_opt(-0.4, 0.05) ==
          doctest::Approx(oracles::grid_posterior_mean(-0.4, 0.05, 0.1)).epsilon(1e-9));
}

TEST_CASE("derivative matches central finite differences") {
    const BernoulliGaussianPrior prior(0.1);
    const double h = 1e-5;
    for (double y : {0.0, 0.3, 1.5})
        for (double a : {0.05, 0.3}) {
            const double fd =
                (prior.f_opt(y + h, a) - prior.f_opt(y - h, a)) / (2.0 * h);
            CHECK(prior.f_opt_deriv(y, a) == doctest::Approx(fd).epsilon(1e-7));
        }
    // tail dominance of the wide component
    CHECK(prior.f_opt_deriv(60.0, 0.05) ==
          doctest::Approx(1.0 / (1.0 + 0.1 * 0.05)).epsilon(1e-9));
}

TEST_CASE("mse against Monte-Carlo, bounds, monotonicity") {
    const double rho = 0.1;
    const BernoulliGaussianPrior prior(rho);
    for (double a : {1e-3, 1e-2, 0.1}) {
        const auto est = oracles::mc_expectation(2000000, 17, [&](std::mt19937_64& rng) {
            std::normal_distribution<double> noise(0.0, std::sqrt(a));
            const double x = oracles::sample_bg(rng, rho);
            const double e = prior.f_opt(x + noise(rng), a) - x;
            return e * e;
        });
        CHECK(std::abs(prior.mse(a) - est.mean) <= 3.0 * est.standard_error);
    }
    double prev = 0.0;
    for (double a : {1e-6, 1e-4, 1e-2, 1.0, 100.0}) {
        const double m = prior.mse(a);
        CHECK(m > prev);
        CHECK(m <= std::min(1.0, a) * (1.0 + 1e-12));
        prev = m;
    }
    CHECK(prior.mse(1e-9) < 1e-8);  // a -> 0+ limit
}

TEST_CASE("xi_bar equals mse/a (Bayes-optimal identity)") {
    const BernoulliGaussianPrior prior(0.1);
    for (double a : {1e-3, 0.05, 0.5, 5.0})
        CHECK(prior.xi_bar(a) == doctest::Approx(prior.mse(a) / a).epsilon(1e-8));
    // large a: matches Monte-Carlo
    const double a = 50.0;
    const auto est = oracles::mc_expectation(500000, 23, [&](std::mt19937_64& rng) {
        std::normal_distribution<double> noise(0.0, std::sqrt(a));
        const double x = oracles::sample_bg(rng, 0.1);
        return prior.f_opt_deriv(x + noise(rng), a);
    });
    CHECK(std::abs(prior.xi_bar(a) - est.mean) <= 3.0 * est.standard_error);
}

TEST_CASE("orthogonality of the posterior mean under quadrature") {
    const double rho = 0.1;
    const BernoulliGaussianPrior prior(rho);
    const auto rule = gauss_hermite(127);
    for (double a : {1e-3, 1e-2, 0.1, 1.0}) {
        const double active = expect_active(rho, a, rule, [&](double z, double w) {
            const double f = prior.f_opt(z + w, a);
            return f * (f - z);
        });
        const double inactive = expect_noise(a, rule, [&](double w) {
            const double f = prior.f_opt(w, a);
            return f * f;
        });
        CHECK(std::abs(rho * active + (1.0 - rho) * inactive) <= 1e-8);
    }
}

TEST_CASE("boundary correlation equals the mse") {
    const BernoulliGaussianPrior prior(0.1);
    for (double a : {0.01, 0.2, 2.0})
        CHECK(prior.boundary_correlation(a) == prior.mse(a));
    const BernoulliGaussianPrior gauss(1.0);
    CHECK(gauss.boundary_correlation(1.0) == doctest::Approx(0.5).epsilon(1e-12));

    // -E[x(f - x)] by direct quadrature
    const double rho = 0.1, a = 0.05;
    const auto rule = gauss_hermite(127);
    const double cross = expect_active(rho, a, rule, [&](double z, double w) {
        return z * (prior.f_opt(z + w, a) - z);
    });
    CHECK(prior.boundary_correlation(a) == doctest::Approx(-rho * cross).epsilon(1e-8));
}

TEST_CASE("pair correlation: degenerate, Gaussian closed form, Monte-Carlo") {
    SUBCASE("degenerate equal covariance returns the mse") {
        const BernoulliGaussianPrior prior(0.1);
        const double a = 0.07;
        CHECK(prior.correlation({a, a, a}) == doctest::Approx(prior.mse(a)));
    }

    SUBCASE("rho = 1 closed form (a_cross + a1 a2)/((1+a1)(1+a2))") {
        const BernoulliGaussianPrior prior(1.0);
        const double a1 = 0.4, a2 = 0.9, c = 0.25;
        const double expected = (c + a1 * a2) / ((1.0 + a1) * (1.0 + a2));
        CHECK(prior.correlation({a1, a2, c}) == doctest::Approx(expected).epsilon(1e-10));
    }

    SUBCASE("rho = 0.1 against a two-dimensional Monte-Carlo oracle") {
        const double rho = 0.1;
        const BernoulliGaussianPrior prior(rho);
        const double a1 = 0.04, a2 = 0.02, c = 0.015;
        const auto est = oracles::mc_expectation(2000000, 31, [&](std::mt19937_64& rng) {
            std::normal_distribution<double> n01(0.0, 1.0);
            const double x = oracles::sample_bg(rng, rho);
            const double w1 = std::sqrt(a1) * n01(rng);
            const double w2 = (c / a1) * w1 + std::sqrt(a2 - c * c / a1) * n01(rng);
            return (prior.f_opt(x + w1, a1) - x) * (prior.f_opt(x + w2, a2) - x);
        });
        CHECK(std::abs(prior.correlation({a1, a2, c}) - est.mean) <=
              3.0 * est.standard_error);
    }

    SUBCASE("symmetry and the Cauchy-Schwarz bound") {
        const BernoulliGaussianPrior prior(0.1);
        const double a1 = 0.04, a2 = 0.02, c = 0.015;
        CHECK(prior.correlation({a1, a2, c}) ==
              doctest::Approx(prior.correlation({a2, a1, c})).epsilon(1e-10));
        CHECK(std::abs(prior.correlation({a1, a2, c})) <=
              std::sqrt(prior.mse(a1) * prior.mse(a2)) + 1e-12);
    }

    SUBCASE("continuous reduction to the mse as the gap shrinks") {
        const BernoulliGaussianPrior prior(0.1);
        const double a = 0.05;
        const double target = prior.mse(a);
        double prev_err = 1.0;
        for (double gap : {1e-2, 1e-4, 1e-6}) {
            const double v = prior.correlation({a, a, a - gap});
            const double err = std::abs(v - target);
            CHECK(err < prev_err + 1e-12);
            prev_err = err;
        }
        CHECK(prev_err < 1e-6);
    }
}
