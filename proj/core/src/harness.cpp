#include "camp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "camp/errors.hpp"
#include "camp/rng.hpp"

namespace camp {

namespace {

// Order-independent (pairwise) reduction over a trial-indexed vector.
double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += v[i];
        return acc;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

double pairwise_sum(const std::vector<double>& v) {
    return v.empty() ? 0.0 : pairwise_sum(v, 0, v.size());
}

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

}  // namespace

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::camp: return "camp";
        case Algorithm::amp: return "amp";
        case Algorithm::oamp: return "oamp";
    }
    return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "camp") return Algorithm::camp;
    if (name == "amp") return Algorithm::amp;
    if (name == "oamp" || name == "oamp_vamp" || name == "vamp") return Algorithm::oamp;
    throw std::invalid_argument("unknown algorithm '" + name + "'");
}

double ExperimentConfig::sigma2() const { return std::pow(10.0, -snr_db / 10.0); }

double ExperimentConfig::delta_value() const {
    return delta ? *delta : static_cast<double>(M) / static_cast<double>(N);
}

EnsembleKind ExperimentConfig::ensemble() const {
    if (kind) return *kind;
    return kappa == 1.0 ? EnsembleKind::row_orthogonal : EnsembleKind::geometric;
}

void ExperimentConfig::validate() const {
    if (M == 0 || N == 0 || M > N)
        throw std::invalid_argument("config: need 0 < M <= N");
    if (delta) {
        const double d = static_cast<double>(M) / static_cast<double>(N);
        if (std::abs(*delta - d) > 1e-12)
            throw std::invalid_argument("config: delta is inconsistent with M/N");
    }
    if (!(rho > 0.0 && rho <= 1.0))
        throw std::invalid_argument("config: rho must lie in (0, 1]");
    if (!(sigma2() > 0.0)) throw std::invalid_argument("config: snr_db implies sigma2 <= 0");
    if (!(zeta > 0.0 && zeta <= 1.0))
        throw std::invalid_argument("config: zeta must lie in (0, 1]");
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (iterations < 1) throw std::invalid_argument("config: iterations must be >= 1");
    if (ensemble() == EnsembleKind::geometric && !(kappa > 1.0))
        throw std::invalid_argument("config: geometric ensemble needs kappa > 1");
    if (algorithms.empty())
        throw std::invalid_argument("config: algorithm set must not be empty");
}

namespace {

std::vector<Algorithm> parse_algorithms(const std::string& value) {
    std::vector<Algorithm> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(algorithm_from_string(item));
    }
    if (out.empty()) throw std::invalid_argument("config: empty algorithm list");
    return out;
}

EnsembleKind kind_from_string(const std::string& value) {
    if (value == "iid_gaussian") return EnsembleKind::iid_gaussian;
    if (value == "row_orthogonal") return EnsembleKind::row_orthogonal;
    if (value == "geometric") return EnsembleKind::geometric;
    throw std::invalid_argument("config: unknown kind '" + value + "'");
}

bool parse_bool(const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw std::invalid_argument("config: expected a boolean, got '" + value + "'");
}

}  // namespace

void apply_override(ExperimentConfig& config, const std::string& key,
                    const std::string& value) {
    if (key == "M") config.M = std::stoull(value);
    else if (key == "N") config.N = std::stoull(value);
    else if (key == "delta") config.delta = std::stod(value);
    else if (key == "rho") config.rho = std::stod(value);
    else if (key == "snr_db") config.snr_db = std::stod(value);
    else if (key == "kappa") config.kappa = std::stod(value);
    else if (key == "kind") config.kind = kind_from_string(value);
    else if (key == "theta_knob") config.theta_knob = std::stod(value);
    else if (key == "zeta") config.zeta = std::stod(value);
    else if (key == "iterations") config.iterations = std::stoull(value);
    else if (key == "trials") config.trials = std::stoull(value);
    else if (key == "base_seed") config.base_seed = std::stoull(value);
    else if (key == "algorithms") config.algorithms = parse_algorithms(value);
    else if (key == "output") config.output = value;
    else if (key == "fresh_matrix_per_trial")
        config.fresh_matrix_per_trial = parse_bool(value);
    else
        throw std::invalid_argument("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig config;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << "config: line " << lineno << " is not of the form key = value";
            throw std::invalid_argument(msg.str());
        }
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        apply_override(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

const AlgorithmResult* AggregateResult::find(Algorithm a) const {
    for (const auto& r : results)
        if (r.algorithm == a) return &r;
    return nullptr;
}

std::size_t worker_count(std::size_t trials) {
    std::size_t workers = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("CAMP_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) workers = static_cast<std::size_t>(v);
    }
    if (workers == 0) workers = 1;
    return std::min(workers, std::max<std::size_t>(trials, 1));
}

AggregateResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const std::size_t T = config.iterations;
    const double sigma2 = config.sigma2();
    const EnsembleKind kind = config.ensemble();
    const BernoulliGaussianPrior prior(config.rho);

    AggregateResult out;
    out.config = config;
    out.timestamp = iso_timestamp();

    SpectralModel model;
    switch (kind) {
        case EnsembleKind::iid_gaussian:
            model = SpectralModel::iid_gaussian(
                config.delta_value(), T + 2);
            break;
        case EnsembleKind::row_orthogonal:
            model = SpectralModel::row_orthogonal(
                config.delta_value(), T + 2);
            break;
        case EnsembleKind::geometric:
            model = SpectralModel::geometric(
                config.kappa, config.delta_value(), T + 2);
            break;
    }

    const FixedPoint fp = solve_fixed_point(model, prior, sigma2);
    out.a_s = fp.a_s;
    out.d_s = fp.d_s;
    out.xi_s = fp.xi_s;

    const Series theta = theta_schedule(config.theta_knob, fp.a_s, fp.d_s, T);
    const TapSchedule schedule = schedule_for(model, theta, T);

    const bool want_camp = std::count(config.algorithms.begin(), config.algorithms.end(),
                                      Algorithm::camp) > 0;
    const bool want_amp = std::count(config.algorithms.begin(), config.algorithms.end(),
                                     Algorithm::amp) > 0;
    const bool want_oamp = std::count(config.algorithms.begin(), config.algorithms.end(),
                                      Algorithm::oamp) > 0;

    SeState camp_se;
    AmpSeTrace amp_se;
    OampSeTrace oamp_se;
    std::size_t camp_T = T;
    if (want_camp) {
        camp_se = solve_camp_se(schedule, prior, sigma2, T, config.zeta);
        camp_T = camp_se.last_valid_t;
        out.camp_se = camp_se;
    }
    if (want_amp) amp_se = solve_amp_se(prior, sigma2, model.delta, T);
    if (want_oamp) oamp_se = solve_oamp_se(model, prior, sigma2, T, config.zeta);

    // Per-algorithm slabs indexed [trial][iteration]; filled by workers and
    // reduced pairwise afterwards so the result is scheduling-independent.
    const std::size_t K = config.trials;
    struct Slab {
        std::vector<std::vector<double>> per_trial;
        std::vector<char> diverged;
    };
    Slab slabs[3];
    for (auto& s : slabs) {
        s.per_trial.assign(K, {});
        s.diverged.assign(K, 0);
    }

    const SensingInstance shared_A =
        config.fresh_matrix_per_trial
            ? SensingInstance{}
            : build_sensing(kind, config.M, config.N,
                            derive_seed(config.base_seed, 0, "matrix"), config.kappa);

    auto run_trial = [&](std::size_t trial) {
        const SensingInstance& A =
            config.fresh_matrix_per_trial
                ? build_sensing(kind, config.M, config.N,
                                derive_seed(config.base_seed, trial, "matrix"),
                                config.kappa)
                : shared_A;
        const Instance inst = generate_instance(
            prior, sigma2, A, derive_seed(config.base_seed, trial, "instance"));
        if (want_camp) {
            CampRunOptions opts;
            opts.zeta = config.zeta;
            RunTrace tr = run_camp(inst.y, A, schedule, camp_se, prior, camp_T, inst.x, opts);
            slabs[0].per_trial[trial] = std::move(tr.mse);
            slabs[0].diverged[trial] = tr.diverged;
        }
        if (want_amp) {
            AmpRunOptions opts;
            opts.zeta = config.zeta;
            RunTrace tr = run_amp(inst.y, A, prior, amp_se, T, inst.x, opts);
            slabs[1].per_trial[trial] = std::move(tr.mse);
            slabs[1].diverged[trial] = tr.diverged;
        }
        if (want_oamp) {
            OampRunOptions opts;
            opts.zeta = config.zeta;
            RunTrace tr = run_oamp_vamp(inst.y, A, prior, oamp_se, sigma2, T, inst.x, opts);
            slabs[2].per_trial[trial] = std::move(tr.mse);
            slabs[2].diverged[trial] = tr.diverged;
        }
    };

    const std::size_t workers = worker_count(K);
    if (workers <= 1) {
        for (std::size_t trial = 0; trial < K; ++trial) run_trial(trial);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (std::size_t trial = w; trial < K; trial += workers) run_trial(trial);
            });
        }
        for (auto& th : pool) th.join();
    }

    auto aggregate = [&](int slab_index, Algorithm algo, std::size_t horizon,
                         const std::function<double(std::size_t)>& se_at,
                         bool se_diverged) {
        const Slab& slab = slabs[slab_index];
        AlgorithmResult res;
        res.algorithm = algo;
        res.se_diverged = se_diverged;
        res.mean_mse.assign(horizon + 1, std::nan(""));
        res.stderr_mse.assign(horizon + 1, std::nan(""));
        res.se_prediction.resize(horizon + 1);
        for (std::size_t t = 0; t <= horizon; ++t) res.se_prediction[t] = se_at(t);
        for (std::size_t k = 0; k < K; ++k) res.diverged_trials += slab.diverged[k];
        std::vector<double> column;
        column.reserve(K);
        for (std::size_t t = 0; t <= horizon; ++t) {
            column.clear();
            for (std::size_t k = 0; k < K; ++k)
                if (t < slab.per_trial[k].size() && std::isfinite(slab.per_trial[k][t]))
                    column.push_back(slab.per_trial[k][t]);
            if (column.empty()) continue;
            const double n = static_cast<double>(column.size());
            const double mean = pairwise_sum(column) / n;
            res.mean_mse[t] = mean;
            if (column.size() > 1) {
                std::vector<double> sq(column.size());
                for (std::size_t k = 0; k < column.size(); ++k) {
                    const double d = column[k] - mean;
                    sq[k] = d * d;
                }
                res.stderr_mse[t] = std::sqrt(pairwise_sum(sq) / (n * (n - 1.0)));
            } else {
                res.stderr_mse[t] = 0.0;
            }
        }
        out.results.push_back(std::move(res));
    };

    if (want_camp)
        aggregate(0, Algorithm::camp, camp_T,
                  [&](std::size_t t) { return camp_se.d_diag(t); }, camp_se.diverged);
    if (want_amp)
        aggregate(1, Algorithm::amp, T,
                  [&](std::size_t t) { return t == 0 ? 1.0 : amp_se.mmse[t - 1]; }, false);
    if (want_oamp)
        aggregate(2, Algorithm::oamp, T,
                  [&](std::size_t t) { return t == 0 ? 1.0 : oamp_se.mse[t - 1]; }, false);

    if (!config.output.empty()) {
        write_result_csv(out, config.output + ".csv");
        write_result_metadata(out, config.output + ".json");
    }
    return out;
}

CompareSeReport compare_se(const AggregateResult& result, Algorithm algorithm,
                           double tolerance, std::size_t t_max) {
    const AlgorithmResult* res = result.find(algorithm);
    if (res == nullptr)
        throw std::invalid_argument("compare_se: algorithm missing from the result");
    if (result.config.trials < 1)
        throw std::invalid_argument("compare_se: no trials to compare");
    CompareSeReport report;
    report.algorithm = algorithm;
    report.damped = result.config.zeta < 1.0;
    const std::size_t limit = std::min(t_max, res->mean_mse.size() - 1);
    report.relative_gap.resize(limit + 1, std::nan(""));
    for (std::size_t t = 0; t <= limit; ++t) {
        const double se = res->se_prediction[t];
        const double mean = res->mean_mse[t];
        if (!(se > 0.0) || !std::isfinite(mean)) continue;
        report.relative_gap[t] = std::abs(mean - se) / se;
        if (report.relative_gap[t] > tolerance) report.flagged.push_back(t);
    }
    return report;
}

std::vector<SweepRow> sweep_kappa(const ExperimentConfig& base,
                                  const std::vector<double>& kappas) {
    std::vector<SweepRow> rows;
    for (double kappa : kappas) {
        ExperimentConfig cfg = base;
        cfg.kappa = kappa;
        cfg.kind.reset();
        cfg.output.clear();
        const double sigma2 = cfg.sigma2();
        const BernoulliGaussianPrior prior(cfg.rho);
        const std::size_t T = cfg.iterations;
        const double delta = cfg.delta_value();
        SpectralModel model = kappa == 1.0
                                  ? SpectralModel::row_orthogonal(delta, T + 2)
                                  : SpectralModel::geometric(kappa, delta, T + 2);
        const FixedPoint fp = solve_fixed_point(model, prior, sigma2);
        const Series theta = theta_schedule(cfg.theta_knob, fp.a_s, fp.d_s, T);
        const TapSchedule schedule = schedule_for(model, theta, T);

        const bool simulate = cfg.trials > 0;
        AggregateResult agg;
        if (simulate) {
            agg = run_experiment(cfg);
        }

        for (Algorithm algo : cfg.algorithms) {
            SweepRow row;
            row.kappa = kappa;
            row.algorithm = algo;
            row.bayes_mse = fp.d_s;
            if (algo == Algorithm::camp) {
                const SeState se = simulate && agg.find(Algorithm::camp)
                                       ? agg.camp_se
                                       : solve_camp_se(schedule, prior, sigma2, T, cfg.zeta);
                row.se_diverged = se.diverged;
                row.se_final = se.d_diag(se.last_valid_t);
                bool settled = !se.diverged && se.last_valid_t == T;
                if (settled) {
                    for (std::size_t t = T >= 10 ? T - 10 : 0; t <= T; ++t)
                        if (std::abs(se.a_diag(t) - fp.a_s) > 1e-6) settled = false;
                }
                row.se_settled = settled;
            } else if (algo == Algorithm::amp) {
                const AmpSeTrace se = solve_amp_se(prior, sigma2, delta, T);
                row.se_final = se.mmse[T - 1];
                row.se_settled = true;
            } else {
                try {
                    const OampSeTrace se = solve_oamp_se(model, prior, sigma2, T, cfg.zeta);
                    row.se_final = se.mse[T - 1];
                    row.se_settled = true;
                } catch (const NumericalError&) {
                    row.se_diverged = true;
                    row.se_final = std::nan("");
                }
            }
            if (simulate) {
                if (const AlgorithmResult* res = agg.find(algo)) {
                    for (std::size_t t = res->mean_mse.size(); t-- > 0;) {
                        if (std::isfinite(res->mean_mse[t])) {
                            row.final_mse = res->mean_mse[t];
                            row.stderr_mse = res->stderr_mse[t];
                            break;
                        }
                    }
                }
            } else {
                row.final_mse = std::nan("");
                row.stderr_mse = std::nan("");
            }
            rows.push_back(row);
        }
    }
    if (!base.output.empty()) write_sweep_csv(rows, base.output + ".csv");
    return rows;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

}  // namespace

void write_result_csv(const AggregateResult& result, const std::string& path) {
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error("cannot open '" + path + "' for writing");
    outf << "iteration,algorithm,mean_mse,stderr,se_prediction\r\n";
    for (const AlgorithmResult& res : result.results) {
        for (std::size_t t = 0; t < res.mean_mse.size(); ++t) {
            outf << t << ',' << csv_escape(to_string(res.algorithm)) << ','
                 << format_double(res.mean_mse[t]) << ','
                 << format_double(res.stderr_mse[t]) << ','
                 << format_double(res.se_prediction[t]) << "\r\n";
        }
    }
}

void write_result_metadata(const AggregateResult& result, const std::string& path) {
    nlohmann::json j;
    const ExperimentConfig& c = result.config;
    j["version"] = kVersion;
    j["timestamp"] = result.timestamp;
    j["config"] = {
        {"M", c.M},
        {"N", c.N},
        {"rho", c.rho},
        {"snr_db", c.snr_db},
        {"kappa", c.kappa},
        {"kind", to_string(c.ensemble())},
        {"theta_knob", c.theta_knob},
        {"zeta", c.zeta},
        {"iterations", c.iterations},
        {"trials", c.trials},
        {"base_seed", c.base_seed},
        {"fresh_matrix_per_trial", c.fresh_matrix_per_trial},
    };
    std::vector<std::string> algos;
    for (Algorithm a : c.algorithms) algos.push_back(to_string(a));
    j["config"]["algorithms"] = algos;
    j["fixed_point"] = {{"a_s", result.a_s}, {"d_s", result.d_s}, {"xi_s", result.xi_s}};
    for (const AlgorithmResult& res : result.results) {
        nlohmann::json entry;
        entry["diverged_trials"] = res.diverged_trials;
        entry["se_diverged"] = res.se_diverged;
        entry["se_exact"] = !(c.zeta < 1.0);  // damped runs are not SE-exact
        j["algorithms"][to_string(res.algorithm)] = entry;
    }
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error("cannot open '" + path + "' for writing");
    outf << j.dump(2) << "\n";
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error("cannot open '" + path + "' for writing");
    outf << "kappa,algorithm,final_mse,stderr,se_final_mse,bayes_mse,se_settled,se_diverged\r\n";
    for (const SweepRow& row : rows) {
        outf << format_double(row.kappa) << ',' << csv_escape(to_string(row.algorithm))
             << ',' << format_double(row.final_mse) << ','
             << format_double(row.stderr_mse) << ',' << format_double(row.se_final)
             << ',' << format_double(row.bayes_mse) << ','
             << (row.se_settled ? 1 : 0) << ',' << (row.se_diverged ? 1 : 0) << "\r\n";
    }
}

}  // namespace camp
