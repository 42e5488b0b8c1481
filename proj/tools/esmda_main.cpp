#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "esmda/csv.hpp"
#include "esmda/errors.hpp"
#include "esmda/oracle.hpp"
#include "esmda/runner.hpp"

namespace {

using nlohmann::json;

json matrix_rows(const esmda::la::Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string fmt(double v) { return esmda::csv::format_value(v); }

esmda::LinearModel linear_model_of(const esmda::RunConfig& config) {
    if (config.forward.kind != esmda::ForwardModelSpec::Kind::linear)
        throw esmda::ConfigError(
            "the exact posterior is only defined for a linear forward "
            "model; this config uses a nonlinear one");
    return {config.forward.g, config.forward.bias};
}

void do_run(esmda::RunConfig config) {
    const esmda::RunRecord record = esmda::run_esmda(config);
    for (const esmda::IterationRecord& it : record.iterations)
        std::cout << "iteration " << it.iteration << ": alpha=" << fmt(it.alpha)
                  << " phi_mean=" << fmt(it.phi_mean) << "\n";
    std::cout << "final forecast: phi_mean=" << fmt(record.final_phi_mean)
              << "\n";
    std::cout << "forward evaluations: " << record.total_evaluations << "\n";
    if (!config.output_dir.empty()) {
        esmda::write_record(record, config.output_dir);
        std::cout << "wrote run files to " << config.output_dir << "\n";
    }
}

void do_validate(const esmda::RunConfig& config) {
    const esmda::AlphaSchedule schedule = config.schedule.build();
    const esmda::ScheduleValidation status = esmda::validate(schedule);
    std::cout << "config OK: n_m=" << config.forward.n_m()
              << " n_d=" << config.forward.n_d() << " n_e=" << config.n_e
              << " n_a=" << schedule.length() << "\n";
    if (status.ok) {
        std::cout << "schedule OK: sum(1/alpha) residual "
                  << fmt(status.residual) << "\n";
    } else if (config.allow_schedule_violation) {
        std::cout << "schedule violation allowed by config: "
                  << status.message << "\n";
    } else {
        throw esmda::ConfigError("config: schedule rejected: " +
                                 status.message);
    }
}

void do_oracle(const esmda::RunConfig& config) {
    const esmda::LinearModel model = linear_model_of(config);
    const esmda::GaussianPosterior posterior =
        esmda::exact_posterior(config.prior, model, config.d_hist,
                               config.noise);
    json out;
    out["mean"] = posterior.mean;
    out["covariance"] = matrix_rows(posterior.covariance);
    std::cout << out.dump(2) << "\n";
}

void do_compare(const esmda::RunConfig& config,
                const std::string& ensemble_path) {
    const esmda::LinearModel model = linear_model_of(config);
    const esmda::GaussianPosterior posterior =
        esmda::exact_posterior(config.prior, model, config.d_hist,
                               config.noise);
    std::ifstream in(ensemble_path, std::ios::binary);
    if (!in)
        throw esmda::ConfigError("cannot open ensemble file: " +
                                 ensemble_path);
    esmda::Ensemble ensemble;
    try {
        ensemble = esmda::read_ensemble_csv(in, ensemble_path);
    } catch (const std::invalid_argument& e) {
        throw esmda::ConfigError("ensemble file " + ensemble_path + ": " +
                                 e.what());
    }
    const esmda::DistanceReport report =
        esmda::posterior_distance(ensemble, posterior);
    json out;
    out["mean_error_in_posterior_std"] = report.mean_error;
    out["covariance_max_rel_error"] = report.covariance_error;
    std::cout << out.dump(2) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ensemble smoother with multiple data assimilation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string ensemble_path;
    std::uint64_t seed_override = 0;
    std::size_t parallelism_override = 1;

    CLI::App* run = app.add_subcommand(
        "run", "Execute a full smoother run from a config file");
    run->add_option("--config", config_path, "JSON config file")->required();
    CLI::Option* seed_opt =
        run->add_option("--seed", seed_override, "Override the config seed");
    CLI::Option* par_opt =
        run->add_option("--parallelism", parallelism_override,
                        "Override the number of concurrent forward runs")
            ->check(CLI::PositiveNumber);
    CLI::Option* out_opt = run->add_option(
        "--out", out_dir, "Directory for run files (overrides the config)");

    CLI::App* validate_cmd = app.add_subcommand(
        "validate", "Parse a config and check its schedule; writes nothing");
    validate_cmd->add_option("--config", config_path, "JSON config file")
        ->required();

    CLI::App* oracle_cmd = app.add_subcommand(
        "oracle",
        "Print the exact posterior of a linear-Gaussian config as JSON");
    oracle_cmd->add_option("--config", config_path, "JSON config file")
        ->required();

    CLI::App* compare_cmd = app.add_subcommand(
        "compare",
        "Report how far an ensemble CSV sits from the exact posterior");
    compare_cmd->add_option("--config", config_path, "JSON config file")
        ->required();
    compare_cmd
        ->add_option("--ensemble", ensemble_path,
                     "Ensemble CSV written by a run")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // bad arguments are config errors
    }

    try {
        esmda::RunConfig config = esmda::load_config(config_path);
        if (run->parsed()) {
            if (seed_opt->count() > 0)
                config.seed = seed_override;
            if (par_opt->count() > 0)
                config.parallelism = parallelism_override;
            if (out_opt->count() > 0)
                config.output_dir = out_dir;
            do_run(std::move(config));
        } else if (validate_cmd->parsed()) {
            do_validate(config);
        } else if (oracle_cmd->parsed()) {
            do_oracle(config);
        } else if (compare_cmd->parsed()) {
            do_compare(config, ensemble_path);
        }
        return 0;
    } catch (const esmda::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const esmda::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
