#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

// ESMDA_CLI_PATH and ESMDA_TEST_DATA_DIR are injected by the build.

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

CliResult run_cli(const std::string& args) {
    const fs::path out_file = fs::current_path() / "cli_stdout.txt";
    const fs::path err_file = fs::current_path() / "cli_stderr.txt";
    const std::string command = std::string("\"") + ESMDA_CLI_PATH + "\" " +
                                args + " > \"" + out_file.string() +
                                "\" 2> \"" + err_file.string() + "\"";
    const int status = std::system(command.c_str());
    CliResult result;
    if (status >= 0 && WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    return result;
}

std::string data(const std::string& name) {
    return (fs::path(ESMDA_TEST_DATA_DIR) / name).string();
}

struct ScratchDir {
    explicit ScratchDir(const std::string& name)
        : path(fs::current_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    fs::path path;
};

} // namespace

TEST_CASE("run reports per-iteration progress and the evaluation count") {
    const CliResult r = run_cli("run --config " + data("linear_small.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("iteration 1: alpha=2 ") != std::string::npos);
    CHECK(r.out.find("iteration 2: alpha=2 ") != std::string::npos);
    CHECK(r.out.find("final forecast: phi_mean=") != std::string::npos);
    CHECK(r.out.find("forward evaluations: 24") != std::string::npos);
    CHECK(r.err.empty());
}

TEST_CASE("run writes the full artifact set when asked") {
    ScratchDir dir("cli_scratch_run");
    const CliResult r =
        run_cli("run --config " + data("linear_small.json") + " --out \"" +
                dir.path.string() + "\"");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("wrote run files to ") != std::string::npos);
    for (const char* name :
         {"config.json", "ensemble_iter0.csv", "ensemble_iter1.csv",
          "ensemble_iter2.csv", "forecast_final.csv", "diagnostics.json",
          "mismatch.csv"}) {
        CAPTURE(name);
        CHECK(fs::exists(dir.path / name));
    }
}

TEST_CASE("seed overrides change the draws, repeated seeds do not") {
    ScratchDir a("cli_scratch_seed_a");
    ScratchDir b("cli_scratch_seed_b");
    ScratchDir c("cli_scratch_seed_c");
    const std::string base = "run --config " + data("linear_small.json");
    CHECK(run_cli(base + " --out \"" + a.path.string() + "\"").exit_code == 0);
    CHECK(run_cli(base + " --out \"" + b.path.string() + "\"").exit_code == 0);
    CHECK(run_cli(base + " --seed 99 --out \"" + c.path.string() + "\"")
              .exit_code == 0);
    CHECK(slurp(a.path / "ensemble_iter0.csv") ==
          slurp(b.path / "ensemble_iter0.csv"));
    CHECK(slurp(a.path / "ensemble_iter0.csv") !=
          slurp(c.path / "ensemble_iter0.csv"));
}

TEST_CASE("a nonlinear run completes through the same interface") {
    const CliResult r = run_cli("run --config " + data("decline_small.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("iteration 4: alpha=4 ") != std::string::npos);
    CHECK(r.out.find("forward evaluations: 80") != std::string::npos);
}

TEST_CASE("validate accepts a sound config") {
    const CliResult r =
        run_cli("validate --config " + data("linear_small.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("config OK: n_m=2 n_d=2 n_e=8 n_a=2") !=
          std::string::npos);
    CHECK(r.out.find("schedule OK") != std::string::npos);
}

TEST_CASE("schedule violations exit with the config-error code") {
    const CliResult r =
        run_cli("validate --config " + data("bad_schedule.json"));
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("schedule rejected") != std::string::npos);
    CHECK(r.err.find("sum(1/alpha)") != std::string::npos);

    const CliResult run_r =
        run_cli("run --config " + data("bad_schedule.json"));
    CHECK(run_r.exit_code == 2);
}

TEST_CASE("unknown config keys exit with the config-error code") {
    const CliResult r = run_cli("run --config " + data("unknown_key.json"));
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("unrecognized key 'n_members'") != std::string::npos);
}

TEST_CASE("numerical blowups exit with their own code") {
    const CliResult r = run_cli("run --config " + data("overflow.json"));
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("overflow") != std::string::npos);
}

TEST_CASE("missing config files exit with the config-error code") {
    const CliResult r = run_cli("run --config no_such_file.json");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("cannot open config file") != std::string::npos);
}

TEST_CASE("oracle prints the closed-form posterior as JSON") {
    const CliResult r =
        run_cli("oracle --config " + data("linear_small.json"));
    CHECK(r.exit_code == 0);
    const auto posterior = nlohmann::json::parse(r.out);
    REQUIRE(posterior.at("mean").size() == 2);
    REQUIRE(posterior.at("covariance").size() == 2);
    CHECK(posterior.at("mean")[0].get<double>() ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(posterior.at("covariance")[0][0].get<double>() ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("oracle refuses nonlinear configs") {
    const CliResult r =
        run_cli("oracle --config " + data("decline_small.json"));
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("linear") != std::string::npos);
}

TEST_CASE("compare scores a run against the exact posterior") {
    ScratchDir dir("cli_scratch_compare");
    CHECK(run_cli("run --config " + data("linear_small.json") + " --out \"" +
                  dir.path.string() + "\"")
              .exit_code == 0);
    const CliResult r =
        run_cli("compare --config " + data("linear_small.json") +
                " --ensemble \"" + (dir.path / "ensemble_iter2.csv").string() +
                "\"");
    CHECK(r.exit_code == 0);
    const auto report = nlohmann::json::parse(r.out);
    REQUIRE(report.at("mean_error_in_posterior_std").size() == 2);
    CHECK(report.at("mean_error_in_posterior_std")[0].get<double>() >= 0.0);
    CHECK(report.at("covariance_max_rel_error").get<double>() >= 0.0);
}

TEST_CASE("compare without a readable ensemble is a config error") {
    const CliResult r =
        run_cli("compare --config " + data("linear_small.json") +
                " --ensemble no_such_ensemble.csv");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("cannot open ensemble file") != std::string::npos);
}

TEST_CASE("argument errors and help use the expected exit codes") {
    CHECK(run_cli("").exit_code == 2);               // missing subcommand
    CHECK(run_cli("run").exit_code == 2);            // missing --config
    CHECK(run_cli("run --frobnicate").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
    const CliResult bad_par =
        run_cli("run --config " + data("linear_small.json") +
                " --parallelism 0");
    CHECK(bad_par.exit_code == 2);
}
