#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "camp/recovery.hpp"
#include "camp/se.hpp"

namespace camp {

inline constexpr const char* kVersion = "0.1.0";

enum class Algorithm { camp, amp, oamp };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

/// Flat experiment configuration. The config-file keys are exactly the field
/// names below; unknown keys are rejected outright.
struct ExperimentConfig {
    std::size_t M = 2048;
    std::size_t N = 4096;
    std::optional<double> delta;  // consistency check against M/N when given
    double rho = 0.1;
    double snr_db = 30.0;
    double kappa = 5.0;
    std::optional<EnsembleKind> kind;  // inferred from kappa when absent
    double theta_knob = 0.0;
    double zeta = 1.0;
    std::size_t iterations = 150;
    std::size_t trials = 100;
    std::uint64_t base_seed = 1;
    std::vector<Algorithm> algorithms = {Algorithm::camp};
    std::string output;  // path prefix for <output>.csv and <output>.json
    bool fresh_matrix_per_trial = false;

    double sigma2() const;
    /// Rate used by the analytic modules: the explicit delta key when given,
    /// else M/N.
    double delta_value() const;
    EnsembleKind ensemble() const;
    void validate() const;
};

/// Strict key = value parser; every key must be an ExperimentConfig field.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);
void apply_override(ExperimentConfig& config, const std::string& key,
                    const std::string& value);

struct AlgorithmResult {
    Algorithm algorithm = Algorithm::camp;
    std::vector<double> mean_mse;       // index t = MSE of x_t
    std::vector<double> stderr_mse;
    std::vector<double> se_prediction;  // aligned with mean_mse
    std::size_t diverged_trials = 0;
    bool se_diverged = false;
};

struct AggregateResult {
    ExperimentConfig config;
    double a_s = 0.0;
    double d_s = 0.0;
    double xi_s = 0.0;
    std::vector<AlgorithmResult> results;
    SeState camp_se;  // populated when camp is among the algorithms
    std::string timestamp;

    const AlgorithmResult* find(Algorithm a) const;
};

/// Full pipeline: taps -> state evolution -> seeded parallel trials ->
/// order-independent aggregation. Writes <output>.csv and <output>.json when
/// config.output is non-empty. Worker count honors the CAMP_WORKERS
/// environment variable.
AggregateResult run_experiment(const ExperimentConfig& config);

struct CompareSeReport {
    Algorithm algorithm = Algorithm::camp;
    std::vector<double> relative_gap;     // |mean - se| / se per iteration
    std::vector<std::size_t> flagged;     // iterations exceeding the tolerance
    bool damped = false;                  // damped runs are not SE-exact
};

/// Per-iteration relative gap between the trial mean and the SE prediction.
CompareSeReport compare_se(const AggregateResult& result, Algorithm algorithm,
                           double tolerance, std::size_t t_max);

struct SweepRow {
    double kappa = 0.0;
    Algorithm algorithm = Algorithm::camp;
    double final_mse = 0.0;      // trial mean at the last iteration (NaN if no trials)
    double stderr_mse = 0.0;
    double se_final = 0.0;       // SE prediction at the last iteration
    double bayes_mse = 0.0;      // fixed-point d_s
    bool se_settled = false;     // last-10 diagonal within 1e-6 of a_s
    bool se_diverged = false;
};

/// Condition-number sweep; trials = 0 in the base config produces SE-only
/// rows. Writes <output>.csv / <output>.json when output is set.
std::vector<SweepRow> sweep_kappa(const ExperimentConfig& base,
                                  const std::vector<double>& kappas);

/// RFC-4180 CSV helpers.
std::string csv_escape(const std::string& field);
void write_result_csv(const AggregateResult& result, const std::string& path);
void write_result_metadata(const AggregateResult& result, const std::string& path);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

std::size_t worker_count(std::size_t trials);

}  // namespace camp
