#include <cmath>
#include <doctest.h>

#include <stdexcept>

#include "camp/spectra.hpp"
#include "oracles.hpp"

using namespace camp;

TEST_CASE("geometric moments: trivial orders") {
    const auto mu = moments_geometric(5.0, 0.5, 4);
    CHECK(mu[0] == 1.0);
    CHECK(mu[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("geometric second moment matches the finite-size ladder") {
    // N^{-1} sum sigma^4 at M = 2^13 and 2^14, Richardson-extrapolated in 1/M.
    const double at_m = oracles::ladder_moment(5.0, 0.5, 1 << 13, 2);
    const double at_2m = oracles::ladder_moment(5.0, 0.5, 1 << 14, 2);
    const double extrapolated = oracles::richardson(at_m, at_2m);
    const auto mu = moments_geometric(5.0, 0.5, 2);
    CHECK(mu[2] == doctest::Approx(extrapolated).epsilon(1e-6));
}

TEST_CASE("geometric moments reject kappa <= 1") {
    CHECK_THROWS_AS(moments_geometric(1.0, 0.5, 4), std::invalid_argument);
    CHECK_THROWS_AS(moments_geometric(0.7, 0.5, 4), std::invalid_argument);
}

TEST_CASE("eta_geometric basics and finite-size check") {
    CHECK(eta_geometric(0.0, 5.0, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    // strictly decreasing on a grid
    double prev = 1.0;
    for (double x = 0.25; x <= 4.0; x += 0.25) {
        const double v = eta_geometric(x, 5.0, 0.5);
        CHECK(v < prev);
        prev = v;
    }
    const double at_m = oracles::ladder_eta(5.0, 0.5, 1 << 13, 1.0);
    const double at_2m = oracles::ladder_eta(5.0, 0.5, 1 << 14, 1.0);
    CHECK(eta_geometric(1.0, 5.0, 0.5) ==
          doctest::Approx(oracles::richardson(at_m, at_2m)).epsilon(1e-6));
}

TEST_CASE("eta inverse round trips and range boundary") {
    CHECK(eta_inverse_geometric(1.0, 5.0, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
    for (double u : {0.99, 0.9, 0.8}) {
        const double x = eta_inverse_geometric(u, 5.0, 0.5);
        CHECK(eta_geometric(x, 5.0, 0.5) == doctest::Approx(u).epsilon(1e-12));
    }
    for (double x : {0.3, 1.7}) {
        const double u = eta_geometric(x, 5.0, 0.5);
        CHECK(eta_inverse_geometric(u, 5.0, 0.5) == doctest::Approx(x).epsilon(1e-12));
    }
    // range endpoint is 1 - delta: just above gives a finite large value,
    // at/below raises
    const double edge = 1.0 - 0.5;
    CHECK(std::isfinite(eta_inverse_geometric(edge + 1e-9, 5.0, 0.5)));
    CHECK(eta_inverse_geometric(edge + 1e-9, 5.0, 0.5) > 1e6);
    CHECK_THROWS_AS(eta_inverse_geometric(edge, 5.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(eta_inverse_geometric(edge - 0.01, 5.0, 0.5), std::domain_error);
}

TEST_CASE("moment sequences against the closed-form eta at small arguments") {
    // eta(x) = sum_j mu_j (-x)^j; at x <= 0.02 the tail beyond j = 8 is
    // far below 1e-8 for every ensemble here.
    const SpectralModel models[] = {
        SpectralModel::iid_gaussian(0.5, 8),
        SpectralModel::row_orthogonal(0.5, 8),
        SpectralModel::geometric(5.0, 0.5, 8),
        SpectralModel::geometric(10.0, 0.5, 8),
    };
    for (const auto& model : models) {
        for (double x : {0.005, 0.01, 0.02}) {
            double series = 0.0, xp = 1.0;
            for (std::size_t j = 0; j <= 8; ++j) {
                series += model.moments[j] * xp;
                xp *= -x;
            }
            CHECK(eta(model, x) == doctest::Approx(series).epsilon(1e-8));
        }
    }
}

TEST_CASE("moment sequences satisfy Hankel positivity on adjacent triples") {
    const SpectralModel models[] = {
        SpectralModel::iid_gaussian(0.5, 12),
        SpectralModel::row_orthogonal(0.25, 12),
        SpectralModel::geometric(5.0, 0.5, 12),
    };
    for (const auto& model : models) {
        CHECK(model.moments[0] == 1.0);
        CHECK(model.moments[1] == doctest::Approx(1.0).epsilon(1e-13));
        for (std::size_t j = 0; j + 2 <= 12; ++j) {
            CHECK(model.moments[j] >= 0.0);
            CHECK(model.moments[j] * model.moments[j + 2] >=
                  model.moments[j + 1] * model.moments[j + 1] * (1.0 - 1e-12));
        }
    }
}

TEST_CASE("R-transform closed form for the i.i.d. Gaussian ensemble") {
    const auto model = SpectralModel::iid_gaussian(0.5, 4);
    CHECK(r_transform(model, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r_transform(model, -1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(r_transform(model, 0.6), std::domain_error);
}

TEST_CASE("generic eta-relationship solver agrees with the closed form") {
    const auto model = SpectralModel::iid_gaussian(0.5, 4);
    const double delta = 0.5;
    auto eta_iid = [&](double s) { return eta(model, s); };
    for (double x = -2.0; x <= 0.0; x += 0.125) {
        const double generic = r_transform_from_eta(eta_iid, x);
        CHECK(generic == doctest::Approx(delta / (delta - x)).epsilon(1e-10));
    }
}

TEST_CASE("row-orthogonal R-transform matches the two-atom closed form") {
    const double delta = 0.5;
    const auto model = SpectralModel::row_orthogonal(delta, 4);
    for (double x : {-2.0, -1.0, -0.3, -0.01}) {
        // positive branch of delta u^2 - (delta + x) u + x(1 - delta) = 0,
        // with R(x) = (u - 1)/x for u = eta at the matching argument
        const double disc = (delta + x) * (delta + x) - 4.0 * delta * x * (1.0 - delta);
        const double u = ((delta + x) + std::sqrt(disc)) / (2.0 * delta);
        CHECK(r_transform(model, x) == doctest::Approx((u - 1.0) / x).epsilon(1e-10));
    }
}

TEST_CASE("geometric R-transform against the free-cumulant series") {
    const auto model = SpectralModel::geometric(5.0, 0.5, 26);
    const auto cumulants = free_cumulants_from_moments(model.moments, 26);
    const double x = -0.1;
    double series = 0.0, xp = 1.0, last_term = 0.0;
    for (std::size_t j = 1; j <= 26; ++j) {
        last_term = cumulants[j] * xp;
        series += last_term;
        xp *= x;
    }
    CHECK(std::abs(last_term) < 1e-9);  // series has converged at this order
    CHECK(r_transform(model, x) == doctest::Approx(series).epsilon(1e-6));
}

TEST_CASE("free cumulant and moment recursions invert each other") {
    const auto mu = moments_geometric(3.0, 0.5, 10);
    const auto c = free_cumulants_from_moments(mu, 10);
    CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-12));
    const auto back = moments_from_free_cumulants(c, 10);
    for (std::size_t j = 0; j <= 10; ++j)
        CHECK(back[j] == doctest::Approx(mu[j]).epsilon(1e-10));
}

TEST_CASE("i.i.d. Gaussian moments come from the cumulants delta^{1-j}") {
    const auto mu = moments_iid_gaussian(0.5, 6);
    CHECK(mu[0] == 1.0);
    CHECK(mu[1] == doctest::Approx(1.0));
    CHECK(mu[2] == doctest::Approx(1.0 + 1.0 / 0.5));  // 1 + 1/delta
    const auto c = free_cumulants_from_moments(mu, 6);
    for (std::size_t j = 1; j <= 6; ++j)
        CHECK(c[j] == doctest::Approx(std::pow(0.5, 1.0 - static_cast<double>(j)))
                          .epsilon(1e-9));
}