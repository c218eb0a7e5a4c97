#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "camp/errors.hpp"
#include "camp/se.hpp"
#include "camp/taps.hpp"

using namespace camp;

TEST_CASE("theta schedule: knob zero is the identity sequence") {
    const Series theta = theta_schedule(0.0, 2.0, 0.5, 6);
    CHECK(theta[0] == 1.0);
    for (std::size_t t = 1; t <= 6; ++t) CHECK(theta[t] == 0.0);
}

TEST_CASE("theta schedule satisfies Theta(a_s/d_s) = 1 by construction") {
    const double a_s = 0.013, d_s = 0.0041;
    const double xi_s = d_s / a_s;
    const Series theta = theta_schedule(2.0, a_s, d_s, 8);
    double value = 0.0, xp = 1.0;
    for (std::size_t t = 0; t <= 8; ++t) {
        value += theta[t] * xp;
        xp *= xi_s;
    }
    CHECK(value == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("theta schedule from the solved fixed point") {
    const auto model = SpectralModel::geometric(5.0, 0.5, 8);
    const BernoulliGaussianPrior prior(0.1);
    const double sigma2 = std::pow(10.0, -3.0);  // 30 dB
    const FixedPoint fp = solve_fixed_point(model, prior, sigma2);
    const Series theta = theta_schedule(1.65, fp.a_s, fp.d_s, 4);
    CHECK(theta[1] == doctest::Approx(-1.65 * fp.xi_s).epsilon(1e-12));
    CHECK(theta[2] == 1.65);
}

TEST_CASE("i.i.d. Gaussian taps reduce to AMP for the identity theta") {
    const auto sch = taps_iid_gaussian(Series::identity(8), 0.5, 8);
    CHECK(sch.g[0] == doctest::Approx(1.0));
    CHECK(sch.g[1] == doctest::Approx(-2.0));
    for (std::size_t t = 2; t <= 8; ++t) CHECK(sch.g[t] == doctest::Approx(0.0));

    const auto square = taps_iid_gaussian(Series::identity(8), 1.0, 8);
    CHECK(square.g[1] == doctest::Approx(-1.0));
    CHECK(square.g[2] == doctest::Approx(0.0));
}

TEST_CASE("row-orthogonal taps have the constant tail 1 - 1/delta") {
    const auto sch = taps_row_orthogonal(0.5, 10);
    for (std::size_t t = 1; t <= 10; ++t) CHECK(sch.g[t] == doctest::Approx(-1.0));
    const auto square = taps_row_orthogonal(1.0, 10);
    for (std::size_t t = 1; t <= 10; ++t)
        CHECK(square.g[t] == doctest::Approx(0.0));
}

TEST_CASE("geometric taps: leading coefficients and singular recursion guard") {
    const auto sch = taps_geometric(Series::identity(12), 5.0, 0.5, 12);
    CHECK(sch.p[0] == 1.0);
    CHECK(sch.q[0] == 1.0);
    CHECK(sch.g[0] == 1.0);
    // theta_0 - theta_1 = 0 makes the qbar recursion singular
    Series bad(12);
    bad[0] = 1.0;
    bad[1] = 1.0;
    CHECK_THROWS_AS(taps_geometric(bad, 5.0, 0.5, 12), std::invalid_argument);
}

TEST_CASE("every constructed schedule satisfies Q*G = P and r = q*theta") {
    const Series theta3 = theta_schedule(1.0, 0.01, 0.004, 16);
    const TapSchedule schedules[] = {
        taps_iid_gaussian(Series::identity(16), 0.5, 16),
        taps_iid_gaussian(theta3, 0.5, 16),
        taps_row_orthogonal(0.5, 16),
        taps_row_orthogonal(theta3, 0.5, 16),
        taps_geometric(Series::identity(16), 5.0, 0.5, 16),
        taps_geometric(theta3, 5.0, 0.5, 16),
    };
    for (const auto& sch : schedules) CHECK(sch.consistency_residual() < 1e-12);
}

TEST_CASE("oracle matches the closed forms coefficient by coefficient") {
    const std::size_t T = 15;

    SUBCASE("i.i.d. Gaussian, identity theta") {
        const auto model = SpectralModel::iid_gaussian(0.5, T + 2);
        const auto g = taps_oracle_dynamical(model.moments, Series::identity(T), T);
        CHECK(g[0] == doctest::Approx(1.0));
        CHECK(g[1] == doctest::Approx(-2.0).epsilon(1e-10));
        for (std::size_t t = 2; t <= T; ++t)
            CHECK(std::abs(g[t]) < 1e-8);
    }

    SUBCASE("i.i.d. Gaussian, three-tap theta") {
        Series theta(T);
        theta[0] = 1.0;
        theta[1] = -0.5;
        theta[2] = 0.25;
        const auto sch = taps_iid_gaussian(theta, 0.5, T);
        const auto model = SpectralModel::iid_gaussian(0.5, T + 2);
        const auto g = taps_oracle_dynamical(model.moments, theta, T);
        for (std::size_t t = 0; t <= 4; ++t)
            CHECK(g[t] == doctest::Approx(sch.g[t]).epsilon(1e-8));
    }

    SUBCASE("row-orthogonal: oracle reproduces the constant tail") {
        const auto model = SpectralModel::row_orthogonal(0.5, T + 2);
        const auto g = taps_oracle_dynamical(model.moments, Series::identity(T), T);
        for (std::size_t t = 1; t <= 10; ++t)
            CHECK(g[t] == doctest::Approx(-1.0).epsilon(1e-8));
    }

    SUBCASE("geometric: closed form vs extended-precision oracle") {
        const auto model = SpectralModel::geometric(5.0, 0.5, T + 2);
        const auto sch = taps_geometric(Series::identity(T), 5.0, 0.5, T);
        const auto g = taps_oracle_extended(model, Series::identity(T), T);
        for (std::size_t t = 1; t <= 6; ++t)
            CHECK(g[t] == doctest::Approx(sch.g[t]).epsilon(1e-6));
    }
}

TEST_CASE("oracle g_1 equals -(mu_2 - mu_1) for the identity theta") {
    // the tau = 0 row is g_0^(j) = mu_{j+1} - mu_j; with theta = identity the
    // first tap is g_1 = -g_0^(1)
    const auto model = SpectralModel::geometric(3.0, 0.5, 6);
    const auto g = taps_oracle_dynamical(model.moments, Series::identity(4), 4);
    CHECK(g[1] == doctest::Approx(-(model.moments[2] - model.moments[1])).epsilon(1e-12));
}

TEST_CASE("oracle instability detection trips on a tight overflow bound") {
    const auto model = SpectralModel::geometric(10.0, 0.5, 22);
    TapOracleOptions options;
    options.overflow_bound = 1e3;  // moments exceed this by tau + j ~ 8
    CHECK_THROWS_AS(taps_oracle_dynamical(model.moments, Series::identity(20), 20, options),
                    NumericalError);
}

TEST_CASE("geometric taps approach row-orthogonal taps as kappa -> 1") {
    const std::size_t T = 12;
    const auto near = taps_geometric(Series::identity(T), 1.0 + 1e-6, 0.5, T);
    const auto ortho = taps_row_orthogonal(0.5, T);
    for (std::size_t t = 0; t <= T; ++t)
        CHECK(near.g[t] == doctest::Approx(ortho.g[t]).epsilon(1e-3));
}

TEST_CASE("generating-function identity holds for the closed-form schedules") {
    const std::size_t T = 14;
    struct Case {
        SpectralModel model;
        TapSchedule schedule;
    };
    const Case cases[] = {
        {SpectralModel::iid_gaussian(0.5, T),
         taps_iid_gaussian(Series::identity(T), 0.5, T)},
        {SpectralModel::row_orthogonal(0.5, T), taps_row_orthogonal(0.5, T)},
        {SpectralModel::geometric(5.0, 0.5, T),
         taps_geometric(Series::identity(T), 5.0, 0.5, T)},
        {SpectralModel::geometric(10.0, 0.5, T),
         taps_geometric(Series::identity(T), 10.0, 0.5, T)},
    };
    for (const auto& c : cases) {
        const auto report = verify_generating_identity(c.schedule, c.model, 12);
        CHECK(report.max_residual <= 1e-8);
    }
}

TEST_CASE("identity residual is exact for the rational row-orthogonal form") {
    const std::size_t T = 14;
    const auto model = SpectralModel::row_orthogonal(0.5, T);
    const auto sch = taps_row_orthogonal(0.5, T);
    const auto report = verify_generating_identity(sch, model, 12);
    CHECK(report.max_residual <= 1e-25);
}

TEST_CASE("perturbing a tap surfaces in the identity residual at low order") {
    const std::size_t T = 14;
    const auto model = SpectralModel::geometric(5.0, 0.5, T);
    auto sch = taps_geometric(Series::identity(T), 5.0, 0.5, T);
    sch.g[3] += 1e-3;
    const auto report = verify_generating_identity(sch, model, 12);
    double low_order = 0.0;
    for (std::size_t k = 0; k <= 4; ++k)
        low_order = std::max(low_order, report.residuals[k]);
    CHECK(low_order >= 1e-4);
}
