// Experiment CLI: tap schedules, state evolution, fixed points, Monte-Carlo
// simulation, condition-number sweeps, and Gaussianity diagnostics.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "camp/errors.hpp"
#include "camp/harness.hpp"
#include "camp/recovery.hpp"
#include "camp/rng.hpp"
#include "camp/se.hpp"
#include "camp/taps.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;  // key=value pairs, applied in order
};

camp::ExperimentConfig load_config(const CommonOptions& common) {
    camp::ExperimentConfig config;
    if (!common.config_path.empty())
        config = camp::parse_config_file(common.config_path);
    for (const std::string& kv : common.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("override '" + kv + "' is not key=value");
        camp::apply_override(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return config;
}

void add_config_flags(CLI::App* cmd, CommonOptions& common) {
    cmd->add_option("--config", common.config_path, "key = value config file");
    cmd->add_option("--set", common.overrides,
                    "raw config override key=value (repeatable)");
    const std::pair<const char*, const char*> flags[] = {
        {"--M", "M"},           {"--N", "N"},
        {"--delta", "delta"},   {"--rho", "rho"},
        {"--snr-db", "snr_db"}, {"--kappa", "kappa"},
        {"--kind", "kind"},     {"--theta-knob", "theta_knob"},
        {"--zeta", "zeta"},     {"--T", "iterations"},
        {"--trials", "trials"}, {"--base-seed", "base_seed"},
        {"--algorithms", "algorithms"}, {"--output", "output"},
    };
    for (const auto& [flag, key] : flags) {
        const std::string key_str = key;
        cmd->add_option_function<std::string>(
            flag,
            [&common, key_str](const std::string& value) {
                common.overrides.push_back(key_str + "=" + value);
            },
            std::string("config key ") + key_str);
    }
}

camp::SpectralModel model_for(const camp::ExperimentConfig& config, std::size_t order) {
    const double delta = config.delta_value();
    switch (config.ensemble()) {
        case camp::EnsembleKind::iid_gaussian:
            return camp::SpectralModel::iid_gaussian(delta, order);
        case camp::EnsembleKind::row_orthogonal:
            return camp::SpectralModel::row_orthogonal(delta, order);
        case camp::EnsembleKind::geometric:
            return camp::SpectralModel::geometric(config.kappa, delta, order);
    }
    throw std::logic_error("unreachable");
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    return file;
}

int cmd_taps(const camp::ExperimentConfig& config) {
    const std::size_t T = config.iterations;
    const camp::SpectralModel model = model_for(config, T + 2);
    camp::Series theta = camp::Series::identity(T);
    if (config.theta_knob != 0.0) {
        const camp::BernoulliGaussianPrior prior(config.rho);
        const camp::FixedPoint fp =
            camp::solve_fixed_point(model, prior, config.sigma2());
        theta = camp::theta_schedule(config.theta_knob, fp.a_s, fp.d_s, T);
    }
    const camp::TapSchedule sch = camp::schedule_for(model, theta, T);
    std::ofstream file;
    std::ostream& out = open_output(file, config.output);
    out << "tau,theta,g,p,q,r\r\n";
    out.precision(17);
    for (std::size_t t = 0; t <= T; ++t)
        out << t << ',' << sch.theta[t] << ',' << sch.g[t] << ',' << sch.p[t] << ','
            << sch.q[t] << ',' << sch.r[t] << "\r\n";
    return 0;
}

int cmd_se(const camp::ExperimentConfig& config, bool full_tables) {
    const std::size_t T = config.iterations;
    const camp::SpectralModel model = model_for(config, T + 2);
    const camp::BernoulliGaussianPrior prior(config.rho);
    const camp::FixedPoint fp = camp::solve_fixed_point(model, prior, config.sigma2());
    const camp::Series theta = camp::theta_schedule(config.theta_knob, fp.a_s, fp.d_s, T);
    const camp::TapSchedule sch = camp::schedule_for(model, theta, T);
    const camp::SeState se =
        camp::solve_camp_se(sch, prior, config.sigma2(), T, config.zeta);

    std::ofstream file;
    std::ostream& out = open_output(file, config.output);
    out.precision(17);
    out << "t,a_tt,d_next_diag,xi_bar\r\n";
    for (std::size_t t = 0; t < se.last_valid_t; ++t)
        out << t << ',' << se.a_diag(t) << ',' << se.d_at(t + 1, t + 1) << ','
            << se.xi_bar[t] << "\r\n";
    if (se.diverged)
        std::cerr << "note: state evolution flagged non-convergent at t = "
                  << se.last_valid_t << "\n";
    if (full_tables && !config.output.empty()) {
        for (const char* which : {"a", "d"}) {
            std::ofstream mat(config.output + "." + which + ".csv");
            mat.precision(17);
            const bool is_a = which[0] == 'a';
            for (std::size_t i = 0; i <= se.last_valid_t; ++i) {
                for (std::size_t j = 0; j <= se.last_valid_t; ++j)
                    mat << (is_a ? se.a_at(i, j) : se.d_at(i, j))
                        << (j == se.last_valid_t ? "" : ",");
                mat << "\r\n";
            }
        }
    }
    return 0;
}

int cmd_fixed_point(const camp::ExperimentConfig& config) {
    const camp::SpectralModel model = model_for(config, 8);
    const camp::BernoulliGaussianPrior prior(config.rho);
    const camp::FixedPoint fp = camp::solve_fixed_point(model, prior, config.sigma2());
    std::cout.precision(17);
    std::cout << "a_s = " << fp.a_s << "\n"
              << "d_s = " << fp.d_s << "\n"
              << "xi_s = " << fp.xi_s << "\n";
    if (fp.second_d_s)
        std::cout << "warning: second fixed point from the low start, d_s = "
                  << *fp.second_d_s << " (possible phase-transition regime)\n";
    return 0;
}

int cmd_simulate(const camp::ExperimentConfig& config) {
    const camp::AggregateResult result = camp::run_experiment(config);
    std::cout.precision(10);
    for (const camp::AlgorithmResult& res : result.results) {
        const std::size_t last = res.mean_mse.size() - 1;
        std::cout << camp::to_string(res.algorithm) << ": final mean MSE "
                  << res.mean_mse[last] << " (SE " << res.se_prediction[last]
                  << ", Bayes-optimal " << result.d_s << ")";
        if (res.diverged_trials > 0)
            std::cout << " [" << res.diverged_trials << " diverged trials]";
        if (res.se_diverged) std::cout << " [SE non-convergent]";
        std::cout << "\n";
    }
    if (!config.output.empty())
        std::cout << "wrote " << config.output << ".csv and " << config.output
                  << ".json\n";
    return 0;
}

int cmd_sweep(const camp::ExperimentConfig& config, const std::string& kappa_list) {
    std::vector<double> kappas;
    std::stringstream ss(kappa_list);
    std::string item;
    while (std::getline(ss, item, ',')) kappas.push_back(std::stod(item));
    if (kappas.empty()) throw std::invalid_argument("sweep-kappa: empty kappa list");
    const auto rows = camp::sweep_kappa(config, kappas);
    std::cout.precision(10);
    std::cout << "kappa algorithm final_mse se_final bayes_mse settled\n";
    for (const auto& row : rows)
        std::cout << row.kappa << ' ' << camp::to_string(row.algorithm) << ' '
                  << row.final_mse << ' ' << row.se_final << ' ' << row.bayes_mse
                  << ' ' << (row.se_settled ? "yes" : "no") << "\n";
    return 0;
}

int cmd_gaussianity(const camp::ExperimentConfig& config, double corrupt_g1) {
    const std::size_t T = config.iterations;
    const camp::SpectralModel model = model_for(config, T + 2);
    const camp::BernoulliGaussianPrior prior(config.rho);
    const camp::FixedPoint fp = camp::solve_fixed_point(model, prior, config.sigma2());
    const camp::Series theta = camp::theta_schedule(config.theta_knob, fp.a_s, fp.d_s, T);
    camp::TapSchedule sch = camp::schedule_for(model, theta, T);
    const camp::SeState se =
        camp::solve_camp_se(sch, prior, config.sigma2(), T, config.zeta);
    if (corrupt_g1 != 0.0) {
        sch.g[1] += corrupt_g1;  // negative control: intentionally wrong tap
        sch.p = sch.g.convolve(sch.q);
    }
    const camp::SensingInstance A =
        camp::build_sensing(config.ensemble(), config.M, config.N,
                            camp::derive_seed(config.base_seed, 0, "matrix"),
                            config.kappa);
    const camp::Instance inst = camp::generate_instance(
        prior, config.sigma2(), A, camp::derive_seed(config.base_seed, 0, "instance"));
    camp::CampRunOptions opts;
    opts.zeta = config.zeta;
    opts.record_gaussianity = true;
    const camp::RunTrace tr = camp::run_camp(inst.y, A, sch, se, prior,
                                             std::min(T, se.last_valid_t), inst.x, opts);
    std::ofstream file;
    std::ostream& out = open_output(file, config.output);
    out.precision(10);
    out << "t,skewness,excess_kurtosis,ks_statistic\r\n";
    for (std::size_t t = 0; t < tr.gaussianity.size(); ++t)
        out << t << ',' << tr.gaussianity[t].skewness << ','
            << tr.gaussianity[t].excess_kurtosis << ','
            << tr.gaussianity[t].ks_statistic << "\r\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayes-optimal convolutional AMP for compressed sensing"};
    app.require_subcommand(1);
    app.set_version_flag("--version", camp::kVersion);

    CommonOptions common;
    std::string kappa_list = "1,2,5,10,15,20";
    bool full_tables = false;
    double corrupt_g1 = 0.0;

    CLI::App* taps = app.add_subcommand("taps", "emit a tap schedule as CSV");
    add_config_flags(taps, common);

    CLI::App* se = app.add_subcommand("se", "solve the CAMP state evolution");
    add_config_flags(se, common);
    se->add_flag("--full", full_tables, "also write the full a/d tables");

    CLI::App* fixed =
        app.add_subcommand("fixed-point", "solve the replica fixed point");
    add_config_flags(fixed, common);

    CLI::App* simulate =
        app.add_subcommand("simulate", "run seeded Monte-Carlo trials");
    add_config_flags(simulate, common);

    CLI::App* sweep =
        app.add_subcommand("sweep-kappa", "final MSE versus condition number");
    add_config_flags(sweep, common);
    sweep->add_option("--kappas", kappa_list, "comma-separated condition numbers");

    CLI::App* gauss = app.add_subcommand(
        "gaussianity", "pre-denoising error normality diagnostics");
    add_config_flags(gauss, common);
    gauss->add_option("--corrupt-g1", corrupt_g1,
                      "offset added to g_1 as a negative control");

    CLI11_PARSE(app, argc, argv);

    try {
        const camp::ExperimentConfig config = load_config(common);
        if (taps->parsed()) return cmd_taps(config);
        if (se->parsed()) return cmd_se(config, full_tables);
        if (fixed->parsed()) return cmd_fixed_point(config);
        if (simulate->parsed()) return cmd_simulate(config);
        if (sweep->parsed()) return cmd_sweep(config, kappa_list);
        if (gauss->parsed()) return cmd_gaussianity(config, corrupt_g1);
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = "command_failed";
        err["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
