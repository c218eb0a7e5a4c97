#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "camp/denoiser.hpp"
#include "camp/se.hpp"
#include "camp/spectra.hpp"
#include "camp/taps.hpp"

namespace camp {

/// In-place fast Walsh-Hadamard transform with orthogonal normalization:
/// applying it twice returns the input and the Euclidean norm is preserved.
/// Length must be a power of two.
void fwht(std::span<double> v);

/// Concrete M x N sensing operator. Structured kinds factor as
/// A = [diag(sigma) 0] V^T with V^T a row-permuted Hadamard matrix, applied
/// in O(N log N); the i.i.d. Gaussian kind stores a dense matrix.
struct SensingInstance {
    EnsembleKind kind = EnsembleKind::row_orthogonal;
    std::size_t M = 0;
    std::size_t N = 0;
    double delta = 1.0;
    double kappa = 1.0;
    double gamma = 0.0;
    std::vector<double> singular_values;        // size M (structured kinds)
    std::vector<std::uint32_t> row_permutation; // size N (structured kinds)
    std::vector<double> dense;                  // size M*N (dense kind)

    bool structured() const { return dense.empty(); }

    /// y = A v. scratch must have length N.
    void apply(std::span<const double> v, std::span<double> y,
               std::span<double> scratch) const;
    /// u = A^T w, u of length N (used as its own workspace).
    void apply_adjoint(std::span<const double> w, std::span<double> u) const;
    /// out = A A^T w; diagonal (O(M)) for structured kinds. scratch length N.
    void apply_gram(std::span<const double> w, std::span<double> out,
                    std::span<double> scratch) const;
};

/// Deterministic instance construction; the spectrum is fixed by the kind
/// (geometric ladder, identical values, or i.i.d. Gaussian draws) and the
/// orthogonal factor's row permutation is a seeded Fisher-Yates shuffle.
SensingInstance build_sensing(EnsembleKind kind, std::size_t M, std::size_t N,
                              std::uint64_t seed, double kappa = 1.0,
                              double gamma = 0.0);

struct Instance {
    std::vector<double> x;  // signal, length N
    std::vector<double> w;  // noise, length M
    std::vector<double> y;  // measurements, length M
};

/// y = A x + w with x i.i.d. Bernoulli-Gaussian and w i.i.d. N(0, sigma2);
/// byte-identical for identical seeds.
Instance generate_instance(const BernoulliGaussianPrior& prior, double sigma2,
                           const SensingInstance& A, std::uint64_t seed);

enum class XiMode { empirical, state_evolution };

struct GaussianityStats {
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double ks_statistic = 0.0;
};

/// Moments and Kolmogorov-Smirnov statistic of the standardized sample.
GaussianityStats compute_gaussianity(std::span<const double> values);

struct RunTrace {
    std::vector<double> mse;            // mse[t] = ||x_t - x||^2 / N, t = 0..T
    std::vector<double> xi;             // xi_t used in the memory term, t = 0..T-1
    std::vector<double> iter_seconds;   // wall clock per iteration
    std::vector<GaussianityStats> gaussianity;  // per iteration when recorded
    std::vector<std::vector<double>> iterates;  // x_1..x_T when recorded
    std::vector<double> x_final;
    bool diverged = false;
    std::size_t last_valid_t = 0;
    std::size_t peak_workspace_scalars = 0;
};

struct CampRunOptions {
    double zeta = 1.0;
    XiMode xi_mode = XiMode::empirical;
    bool record_gaussianity = false;
    bool record_iterates = false;
};

/// Convolutional AMP on a finite instance. Retains z_tau and A A^T z_tau for
/// all past iterations and maintains the xi-product column multiplicatively,
/// so one iteration costs O(N log N + t M). Denoisers are parameterized by
/// the state-evolution diagonal a_{t,t}; the memory term uses the empirical
/// xi_t = <f_t'> by default.
RunTrace run_camp(const std::vector<double>& y, const SensingInstance& A,
                  const TapSchedule& schedule, const SeState& se,
                  const ScalarPrior& prior, std::size_t T,
                  const std::vector<double>& true_x,
                  const CampRunOptions& options = {});

struct AmpRunOptions {
    double zeta = 1.0;
    XiMode xi_mode = XiMode::state_evolution;
    bool record_iterates = false;
};

/// Plain AMP with the single-lag Onsager term (xi_{t-1}/delta) z_{t-1};
/// denoisers are parameterized by the AMP state-evolution variances.
RunTrace run_amp(const std::vector<double>& y, const SensingInstance& A,
                 const ScalarPrior& prior, const AmpSeTrace& se, std::size_t T,
                 const std::vector<double>& true_x,
                 const AmpRunOptions& options = {});

struct OampRunOptions {
    double zeta = 1.0;
    bool record_iterates = false;
};

/// OAMP/VAMP with the LMMSE filter applied through the construction SVD
/// (W_t is diagonal in the U basis, so one iteration is O(N log N)).
/// The variance messages come from the (zeta-damped) state evolution; the
/// x messages are damped with the same zeta. sigma2 parameterizes W_t.
RunTrace run_oamp_vamp(const std::vector<double>& y, const SensingInstance& A,
                       const ScalarPrior& prior, const OampSeTrace& se,
                       double sigma2, std::size_t T,
                       const std::vector<double>& true_x,
                       const OampRunOptions& options = {});

}  // namespace camp
