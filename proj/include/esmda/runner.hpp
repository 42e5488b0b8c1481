#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "esmda/alpha.hpp"
#include "esmda/analysis.hpp"
#include "esmda/ensemble.hpp"
#include "esmda/forward.hpp"
#include "esmda/la.hpp"

// The driver: configuration, the multiple-data-assimilation loop, and
// persistence of every snapshot and diagnostic a run produces.

namespace esmda {

/// Inflation schedule as written in a config file, kept symbolic so a
/// config round-trips exactly.
struct ScheduleSpec {
    enum class Kind { equal, geometric, explicit_values };
    Kind kind = Kind::equal;
    std::size_t n_a = 4;   // equal and geometric
    double ratio = 0.5;    // geometric only
    la::Vector alphas;     // explicit_values only

    AlphaSchedule build() const;

    friend bool operator==(const ScheduleSpec&, const ScheduleSpec&) = default;
};

struct ForwardModelSpec {
    enum class Kind { linear, decline };
    Kind kind = Kind::linear;
    la::Matrix g;      // linear
    la::Vector bias;   // linear, empty means zero
    la::Vector times;  // decline

    std::size_t n_m() const;
    std::size_t n_d() const;
    std::unique_ptr<ForwardModel> build() const;

    friend bool operator==(const ForwardModelSpec&,
                           const ForwardModelSpec&) = default;
};

struct RunConfig {
    std::uint64_t seed = 0;
    std::size_t n_e = 0;
    ScheduleSpec schedule;
    bool allow_schedule_violation = false;
    GaussianPrior prior;
    ForwardModelSpec forward;
    la::Vector d_hist;
    NoiseModel noise;
    SolverChoice solver;
    std::size_t parallelism = 1;
    std::string output_dir; // empty: caller decides where files go

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses a JSON config. Unknown keys are rejected; every error names the
/// offending location as a JSON pointer. CSV references ({"csv": path})
/// are resolved against base_dir and loaded, so the returned config is
/// self-contained.
RunConfig parse_config(std::string_view json_text,
                       const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form: all values inline, execution knobs (parallelism,
/// output_dir) omitted so persisted runs compare bitwise across schedulers.
/// load(save(c)) == c for any config at the default knobs.
std::string config_to_json(const RunConfig& config);
void save_config(const RunConfig& config, const std::filesystem::path& path);

struct IterationRecord {
    std::size_t iteration = 0; // 1-based
    double alpha = 0.0;
    Ensemble ensemble;      // parameter ensemble after this update
    la::Vector phi_members; // forecast mismatch before this update
    double phi_mean = 0.0;
};

struct RunRecord {
    RunConfig config;
    ScheduleValidation schedule_status;
    Ensemble initial_ensemble;
    std::vector<IterationRecord> iterations;
    Ensemble final_forecast; // simulated data of the final ensemble
    la::Vector final_phi_members;
    double final_phi_mean = 0.0;
    std::uint64_t total_evaluations = 0; // always (N_a + 1) * N_e
};

/// Runs the full smoother: prior sample, N_a forecast/perturb/update
/// rounds, one last forecast of the converged ensemble. Deterministic in
/// config.seed for any parallelism. Rejects a schedule whose reciprocals
/// do not sum to one unless allow_schedule_violation is set.
RunRecord run_esmda(const RunConfig& config);

/// Writes config.json, ensemble_iter{0..N_a}.csv, forecast_final.csv,
/// diagnostics.json and mismatch.csv into dir (created if needed).
void write_record(const RunRecord& record, const std::filesystem::path& dir);

/// Mismatch table for external plotting: "iteration,member,phi" rows for
/// every assimilation round plus the final forecast (labeled N_a + 1).
std::string summarize(const RunRecord& record);

} // namespace esmda
