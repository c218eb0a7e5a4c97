#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace camp {

enum class EnsembleKind { iid_gaussian, row_orthogonal, geometric };

std::string to_string(EnsembleKind kind);

/// Asymptotic spectrum of A^T A for one of the three sensing ensembles:
/// compression rate delta = M/N, moment sequence mu_0..mu_{max_order}, and
/// the closed-form eta- and R-transforms. The rank-one mean weight gamma of
/// the i.i.d. Gaussian ensemble does not move the asymptotic spectrum and is
/// kept as instance-generation metadata only.
struct SpectralModel {
    EnsembleKind kind = EnsembleKind::row_orthogonal;
    double delta = 1.0;
    double kappa = 1.0;   // condition number, geometric ensemble only
    double gamma = 0.0;   // mean weight, i.i.d. Gaussian ensemble only
    std::vector<double> moments;

    static SpectralModel iid_gaussian(double delta, std::size_t max_order,
                                      double gamma = 0.0);
    static SpectralModel row_orthogonal(double delta, std::size_t max_order);
    static SpectralModel geometric(double kappa, double delta, std::size_t max_order);

    std::size_t max_order() const { return moments.empty() ? 0 : moments.size() - 1; }
};

std::vector<double> moments_geometric(double kappa, double delta, std::size_t max_order);
std::vector<double> moments_row_orthogonal(double delta, std::size_t max_order);
std::vector<double> moments_iid_gaussian(double delta, std::size_t max_order);

/// eta(x) = E[(1 + x lambda)^{-1}] of the model's eigenvalue law, closed form
/// per ensemble, valid for x >= 0.
double eta(const SpectralModel& model, double x);

double eta_geometric(double x, double kappa, double delta);

/// Inverse of eta for the geometric ensemble. The range of eta is
/// (1 - delta, 1]; u at or below 1 - delta raises std::domain_error.
double eta_inverse_geometric(double u, double kappa, double delta);

/// R-transform of the model's eigenvalue law. Closed form delta/(delta - x)
/// for the i.i.d. Gaussian ensemble; for the others the implicit relation
/// eta(s) = 1/(1 + s R(-s eta(s))) is solved by bracketed root-finding
/// (supported for x <= 0, which covers every use in the fixed-point solver).
double r_transform(const SpectralModel& model, double x);

/// Generic solver behind r_transform, exposed so closed forms can be
/// cross-checked. eta_fn must be the eta-transform of a unit-first-moment
/// law; x must be <= 0.
double r_transform_from_eta(const std::function<double(double)>& eta_fn, double x);

/// Free-cumulant helpers (moment-cumulant recursion via M(z) = C(zM(z))).
std::vector<double> moments_from_free_cumulants(const std::vector<double>& cumulants,
                                                std::size_t max_order);
std::vector<double> free_cumulants_from_moments(const std::vector<double>& moments,
                                                std::size_t max_order);

}  // namespace camp
