#pragma once

#include <cstddef>
#include <vector>

namespace camp {

/// Covariance of the pair of effective noises seen by two coupled scalar
/// observations of the same signal component.
struct NoisePairCov {
    double var_first = 1.0;   // a_{t',t'}
    double var_second = 1.0;  // a_{t,t}
    double cross = 0.0;       // a_{t',t}
};

/// Scalar prior interface: everything state evolution and the recovery
/// algorithms need from a signal law. Only Bernoulli-Gaussian ships.
class ScalarPrior {
public:
    virtual ~ScalarPrior() = default;

    /// Posterior mean E[x | x + z = y], z ~ N(0, a).
    virtual double f_opt(double y, double a) const = 0;
    /// d f_opt / dy.
    virtual double f_opt_deriv(double y, double a) const = 0;
    /// E[(f_opt(x+z; a) - x)^2].
    virtual double mse(double a) const = 0;
    /// E[f_opt'(x+z; a)].
    virtual double xi_bar(double a) const = 0;
    /// E[(f_opt(Y_t') - x)(f_opt(Y_t) - x)] for correlated observations.
    virtual double correlation(const NoisePairCov& cov) const = 0;
    /// -E[x (f_opt(x+z; a) - x)]; equals mse(a) for a posterior mean.
    virtual double boundary_correlation(double a) const = 0;
};

/// Gauss-Hermite rule for the physicists' weight exp(-x^2).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(std::size_t order);

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(std::size_t order);

/// Bernoulli-Gaussian law: zero with probability 1 - rho, otherwise Gaussian
/// with variance 1/rho, so the signal power is one and SNR = 1/sigma^2.
///
/// Expectations decompose exactly over the two mixture components. Each
/// component is integrated with Gauss-Legendre panels whose breakpoints are
/// pinned to the spike-posterior transition (the posterior odds are linear
/// in y^2, so the layer location is analytic); plain Gauss-Hermite cannot
/// resolve that layer at small noise variance. order_1d and order_2d are the
/// per-panel orders of the marginal and pair expectations; the node tables
/// are built once at construction and shared read-only.
class BernoulliGaussianPrior final : public ScalarPrior {
public:
    explicit BernoulliGaussianPrior(double rho, std::size_t order_1d = 32,
                                    std::size_t order_2d = 16);

    double rho() const { return rho_; }

    /// Posterior probability that the component is active given y = x + z,
    /// z ~ N(0, a). Evaluated in log-space; exact 1 when rho = 1.
    double spike_posterior(double y, double a) const;

    double f_opt(double y, double a) const override;
    double f_opt_deriv(double y, double a) const override;
    double mse(double a) const override;
    double xi_bar(double a) const override;
    double correlation(const NoisePairCov& cov) const override;
    double boundary_correlation(double a) const override;

private:
    template <typename F>
    double expect_marginal(double a, F&& integrand) const;

    double rho_;
    GaussLegendreRule marginal_rule_;
    GaussLegendreRule outer_rule_;
    GaussLegendreRule inner_rule_;
};

}  // namespace camp
