#include "esmda/runner.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>

#include <json.hpp>

#include "esmda/csv.hpp"
#include "esmda/errors.hpp"

namespace esmda {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config: " + where + ": " + what);
}

/// Runs f, turning contract violations from constructors into config
/// errors that carry the JSON location.
template <typename F>
auto checked(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
}

std::string join(const std::string& where, const std::string& key) {
    return where == "/" ? "/" + key : where + "/" + key;
}

const json& member(const json& obj, const std::string& where,
                   const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end())
        fail(where, std::string("missing required key '") + key + "'");
    return *it;
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object())
        fail(where, std::string("expected an object, found ") +
                        obj.type_name());
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known)
            fail(where, "unrecognized key '" + item.key() + "'");
    }
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number())
        fail(where, std::string("expected a number, found ") + v.type_name());
    return v.get<double>();
}

std::uint64_t as_u64(const json& v, const std::string& where) {
    if (!v.is_number_unsigned())
        fail(where, std::string("expected a non-negative integer, found ") +
                        v.type_name());
    return v.get<std::uint64_t>();
}

std::size_t as_positive_count(const json& v, const std::string& where) {
    const std::uint64_t n = as_u64(v, where);
    if (n == 0)
        fail(where, "must be at least 1");
    return static_cast<std::size_t>(n);
}

bool as_bool(const json& v, const std::string& where) {
    if (!v.is_boolean())
        fail(where, std::string("expected true or false, found ") +
                        v.type_name());
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string())
        fail(where, std::string("expected a string, found ") + v.type_name());
    return v.get<std::string>();
}

la::Vector inline_vector(const json& v, const std::string& where) {
    la::Vector out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_number(v[i], join(where, std::to_string(i))));
    return out;
}

/// A value loadable from CSV may be a bare path string or {"csv": path}.
const std::string* csv_reference(const json& v, const std::string& where,
                                 std::string& storage) {
    if (v.is_string()) {
        storage = v.get<std::string>();
        return &storage;
    }
    if (v.is_object()) {
        check_keys(v, where, {"csv"});
        storage = as_string(member(v, where, "csv"), join(where, "csv"));
        return &storage;
    }
    return nullptr;
}

/// Array of numbers, or a CSV path resolved against base_dir.
la::Vector parse_vector(const json& v, const std::string& where,
                        const std::filesystem::path& base_dir) {
    if (v.is_array())
        return inline_vector(v, where);
    std::string rel;
    if (csv_reference(v, where, rel))
        return csv::read_vector_file(base_dir / rel);
    fail(where, std::string("expected an array of numbers or a CSV path, "
                            "found ") +
                    v.type_name());
}

/// Array of equal-length number rows, or a CSV path.
la::Matrix parse_matrix(const json& v, const std::string& where,
                        const std::filesystem::path& base_dir) {
    std::string rel;
    if (csv_reference(v, where, rel)) {
        const csv::Table table = csv::read_table_file(base_dir / rel);
        if (table.values.empty())
            fail(where, "CSV file " + (base_dir / rel).string() +
                            " holds no numeric rows");
        return table.values;
    }
    if (!v.is_array() || v.empty())
        fail(where, std::string("expected a non-empty array of rows or a "
                                "CSV path, found ") +
                        v.type_name());
    const std::size_t rows = v.size();
    if (!v[0].is_array() || v[0].empty())
        fail(join(where, "0"), "expected a non-empty array of numbers");
    const std::size_t cols = v[0].size();
    la::Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const json& row = v[i];
        const std::string row_where = join(where, std::to_string(i));
        if (!row.is_array())
            fail(row_where, "expected an array of numbers");
        if (row.size() != cols)
            fail(row_where, "row has " + std::to_string(row.size()) +
                                " values but row 0 has " +
                                std::to_string(cols));
        for (std::size_t j = 0; j < cols; ++j)
            m(i, j) = as_number(row[j], join(row_where, std::to_string(j)));
    }
    return m;
}

ScheduleSpec parse_schedule(const json& v, const std::string& where) {
    if (!v.is_object())
        fail(where, std::string("expected an object, found ") +
                        v.type_name());
    const std::string type =
        as_string(member(v, where, "type"), join(where, "type"));
    ScheduleSpec spec;
    if (type == "equal") {
        check_keys(v, where, {"type", "n_a"});
        spec.kind = ScheduleSpec::Kind::equal;
        spec.n_a =
            as_positive_count(member(v, where, "n_a"), join(where, "n_a"));
    } else if (type == "geometric") {
        check_keys(v, where, {"type", "n_a", "ratio"});
        spec.kind = ScheduleSpec::Kind::geometric;
        spec.n_a =
            as_positive_count(member(v, where, "n_a"), join(where, "n_a"));
        spec.ratio =
            as_number(member(v, where, "ratio"), join(where, "ratio"));
    } else if (type == "explicit") {
        check_keys(v, where, {"type", "alphas"});
        spec.kind = ScheduleSpec::Kind::explicit_values;
        const json& alphas = member(v, where, "alphas");
        if (!alphas.is_array() || alphas.empty())
            fail(join(where, "alphas"),
                 "expected a non-empty array of numbers");
        spec.alphas = inline_vector(alphas, join(where, "alphas"));
        spec.n_a = spec.alphas.size();
    } else {
        fail(join(where, "type"),
             "unknown schedule type '" + type +
                 "' (expected \"equal\", \"geometric\" or \"explicit\")");
    }
    (void)spec.build(); // surfaces bad values (ratio, positivity) at load time
    return spec;
}

ForwardModelSpec parse_forward(const json& v, const std::string& where,
                               const std::filesystem::path& base_dir) {
    if (!v.is_object())
        fail(where, std::string("expected an object, found ") +
                        v.type_name());
    const std::string type =
        as_string(member(v, where, "type"), join(where, "type"));
    ForwardModelSpec spec;
    if (type == "linear") {
        check_keys(v, where, {"type", "G", "bias"});
        spec.kind = ForwardModelSpec::Kind::linear;
        spec.g = parse_matrix(member(v, where, "G"), join(where, "G"),
                              base_dir);
        if (v.contains("bias"))
            spec.bias = parse_vector(v["bias"], join(where, "bias"),
                                     base_dir);
    } else if (type == "decline") {
        check_keys(v, where, {"type", "times"});
        spec.kind = ForwardModelSpec::Kind::decline;
        spec.times = parse_vector(member(v, where, "times"),
                                  join(where, "times"), base_dir);
    } else {
        fail(join(where, "type"),
             "unknown forward-model type '" + type +
                 "' (expected \"linear\" or \"decline\")");
    }
    (void)spec.build(); // validates matrix/times constraints at load time
    return spec;
}

GaussianPrior parse_prior(const json& v, const std::string& where,
                          const std::filesystem::path& base_dir) {
    check_keys(v, where, {"mean", "covariance", "covariance_factor"});
    la::Vector mean =
        parse_vector(member(v, where, "mean"), join(where, "mean"), base_dir);
    const std::size_t n = mean.size();
    const bool has_cov = v.contains("covariance");
    const bool has_factor = v.contains("covariance_factor");
    if (has_cov == has_factor)
        fail(where,
             "exactly one of 'covariance' and 'covariance_factor' is "
             "required");
    const char* key = has_cov ? "covariance" : "covariance_factor";
    const std::string mat_where = join(where, key);
    const la::Matrix mat = parse_matrix(v[key], mat_where, base_dir);
    if (mat.rows() != n || mat.cols() != n)
        fail(mat_where, "expected a " + std::to_string(n) + "-by-" +
                            std::to_string(n) +
                            " matrix to match the mean, found " +
                            std::to_string(mat.rows()) + "-by-" +
                            std::to_string(mat.cols()));
    return checked(mat_where, [&] {
        return has_cov ? GaussianPrior::from_covariance(std::move(mean), mat)
                       : GaussianPrior(std::move(mean), mat);
    });
}

SolverChoice parse_solver(const json& v, const std::string& where) {
    check_keys(v, where, {"mode", "energy_fraction"});
    SolverChoice choice;
    const std::string mode =
        as_string(member(v, where, "mode"), join(where, "mode"));
    if (mode == "dense") {
        choice.mode = SolverChoice::Mode::dense;
    } else if (mode == "subspace") {
        choice.mode = SolverChoice::Mode::subspace;
    } else {
        fail(join(where, "mode"), "unknown solver mode '" + mode +
                                      "' (expected \"dense\" or "
                                      "\"subspace\")");
    }
    if (v.contains("energy_fraction")) {
        const std::string f_where = join(where, "energy_fraction");
        const double f = as_number(v["energy_fraction"], f_where);
        if (!(f > 0.0) || !(f <= 1.0))
            fail(f_where, "must lie in (0, 1], got " + csv::format_value(f));
        choice.energy_fraction = f;
    }
    return choice;
}

/// Cross-dimension consistency, shared by parse_config and run_esmda so
/// hand-built configs get the same checks as loaded ones.
void check_config(const RunConfig& config) {
    const std::size_t n_m = config.forward.n_m();
    const std::size_t n_d = config.forward.n_d();
    if (config.n_e < 2)
        throw ConfigError("config: n_e must be at least 2, found " +
                          std::to_string(config.n_e));
    if (config.parallelism < 1)
        throw ConfigError("config: parallelism must be at least 1");
    if (config.prior.dim() != n_m)
        throw ConfigError(
            "config: prior has dimension " + std::to_string(config.prior.dim()) +
            " but the forward model expects " + std::to_string(n_m) +
            " parameters");
    if (config.d_hist.size() != n_d)
        throw ConfigError("config: d_hist holds " +
                          std::to_string(config.d_hist.size()) +
                          " values but the forward model produces " +
                          std::to_string(n_d));
    if (config.noise.dim() != n_d)
        throw ConfigError("config: sigma_d holds " +
                          std::to_string(config.noise.dim()) +
                          " values but the forward model produces " +
                          std::to_string(n_d));
}

json matrix_to_json(const la::Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ConfigError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out)
        throw ConfigError("failed writing " + path.string());
}

void write_ensemble_file(const Ensemble& e,
                         const std::filesystem::path& path,
                         std::string_view prefix) {
    std::ostringstream buffer;
    write_ensemble_csv(e, buffer, prefix);
    write_text_file(path, buffer.str());
}

} // namespace

AlphaSchedule ScheduleSpec::build() const {
    try {
        switch (kind) {
        case Kind::equal:
            return AlphaSchedule::equal_weights(n_a);
        case Kind::geometric:
            return AlphaSchedule::geometric_decreasing(n_a, ratio);
        case Kind::explicit_values:
            return AlphaSchedule::from_values(alphas);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: schedule: ") + e.what());
    }
    throw ConfigError("config: schedule: unknown kind");
}

std::size_t ForwardModelSpec::n_m() const {
    return kind == Kind::linear ? g.cols() : 2;
}

std::size_t ForwardModelSpec::n_d() const {
    return kind == Kind::linear ? g.rows() : times.size();
}

std::unique_ptr<ForwardModel> ForwardModelSpec::build() const {
    try {
        if (kind == Kind::linear)
            return std::make_unique<LinearModel>(g, bias);
        return std::make_unique<DeclineCurveModel>(times);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: forward model: ") + e.what());
    }
}

RunConfig parse_config(std::string_view json_text,
                       const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") +
                          e.what());
    }
    check_keys(root, "/",
               {"seed", "n_e", "schedule", "allow_schedule_violation",
                "prior", "forward", "d_hist", "sigma_d", "solver",
                "parallelism", "output_dir"});

    RunConfig config;
    config.seed = as_u64(member(root, "/", "seed"), "/seed");
    config.n_e = as_positive_count(member(root, "/", "n_e"), "/n_e");
    config.schedule = parse_schedule(member(root, "/", "schedule"),
                                     "/schedule");
    if (root.contains("allow_schedule_violation"))
        config.allow_schedule_violation =
            as_bool(root["allow_schedule_violation"],
                    "/allow_schedule_violation");
    config.prior = parse_prior(member(root, "/", "prior"), "/prior",
                               base_dir);
    config.forward = parse_forward(member(root, "/", "forward"), "/forward",
                                   base_dir);
    config.d_hist = parse_vector(member(root, "/", "d_hist"), "/d_hist",
                                 base_dir);
    config.noise = checked("/sigma_d", [&] {
        return NoiseModel(parse_vector(member(root, "/", "sigma_d"),
                                       "/sigma_d", base_dir));
    });
    if (root.contains("solver"))
        config.solver = parse_solver(root["solver"], "/solver");
    if (root.contains("parallelism"))
        config.parallelism =
            as_positive_count(root["parallelism"], "/parallelism");
    if (root.contains("output_dir"))
        config.output_dir = as_string(root["output_dir"], "/output_dir");

    check_config(config);
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.parent_path());
}

std::string config_to_json(const RunConfig& config) {
    json root;
    root["seed"] = config.seed;
    root["n_e"] = config.n_e;

    json schedule;
    switch (config.schedule.kind) {
    case ScheduleSpec::Kind::equal:
        schedule["type"] = "equal";
        schedule["n_a"] = config.schedule.n_a;
        break;
    case ScheduleSpec::Kind::geometric:
        schedule["type"] = "geometric";
        schedule["n_a"] = config.schedule.n_a;
        schedule["ratio"] = config.schedule.ratio;
        break;
    case ScheduleSpec::Kind::explicit_values:
        schedule["type"] = "explicit";
        schedule["alphas"] = config.schedule.alphas;
        break;
    }
    root["schedule"] = std::move(schedule);
    root["allow_schedule_violation"] = config.allow_schedule_violation;

    json prior;
    prior["mean"] = config.prior.mean();
    prior["covariance_factor"] = matrix_to_json(config.prior.covariance_factor());
    root["prior"] = std::move(prior);

    json forward;
    if (config.forward.kind == ForwardModelSpec::Kind::linear) {
        forward["type"] = "linear";
        forward["G"] = matrix_to_json(config.forward.g);
        if (!config.forward.bias.empty())
            forward["bias"] = config.forward.bias;
    } else {
        forward["type"] = "decline";
        forward["times"] = config.forward.times;
    }
    root["forward"] = std::move(forward);

    root["d_hist"] = config.d_hist;
    root["sigma_d"] = config.noise.std_devs();

    json solver;
    solver["mode"] = config.solver.mode == SolverChoice::Mode::dense
                         ? "dense"
                         : "subspace";
    solver["energy_fraction"] = config.solver.energy_fraction;
    root["solver"] = std::move(solver);

    // parallelism and output_dir are execution knobs, not part of the
    // problem; leaving them out keeps persisted runs byte-identical no
    // matter how they were scheduled.
    return root.dump(2) + "\n";
}

void save_config(const RunConfig& config, const std::filesystem::path& path) {
    write_text_file(path, config_to_json(config));
}

RunRecord run_esmda(const RunConfig& config) {
    check_config(config);
    const AlphaSchedule schedule = config.schedule.build();
    const ScheduleValidation status = validate(schedule);
    if (!status.ok && !config.allow_schedule_violation)
        throw ConfigError("config: schedule rejected: " + status.message);

    const std::unique_ptr<ForwardModel> model = config.forward.build();
    const rng::StreamFactory streams(config.seed);
    RunCounter counter;

    RunRecord record;
    record.config = config;
    record.schedule_status = status;

    Ensemble ensemble = sample_prior(config.prior, config.n_e, streams);
    record.initial_ensemble = ensemble;

    const std::size_t n_a = schedule.length();
    record.iterations.reserve(n_a);
    for (std::size_t l = 1; l <= n_a; ++l) {
        const double alpha = schedule.values()[l - 1];
        try {
            const Ensemble sims =
                evaluate_batch(*model, ensemble, config.parallelism, counter);
            const MismatchReport mismatch =
                data_mismatch(sims, config.d_hist, config.noise);
            const la::Matrix perturbed = perturb_observations(
                config.d_hist, config.noise, alpha, streams, l, config.n_e);
            ensemble =
                config.solver.mode == SolverChoice::Mode::dense
                    ? analysis_update_dense(ensemble, sims, perturbed,
                                            config.noise, alpha)
                    : analysis_update_subspace(ensemble, sims, perturbed,
                                               config.noise, alpha,
                                               config.solver);
            record.iterations.push_back(IterationRecord{
                l, alpha, ensemble, mismatch.per_member, mismatch.mean});
        } catch (const NumericalError& e) {
            throw NumericalError("iteration " + std::to_string(l) + ": " +
                                 e.what());
        }
    }

    try {
        record.final_forecast =
            evaluate_batch(*model, ensemble, config.parallelism, counter);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("final forecast: ") + e.what());
    }
    const MismatchReport final_mismatch =
        data_mismatch(record.final_forecast, config.d_hist, config.noise);
    record.final_phi_members = final_mismatch.per_member;
    record.final_phi_mean = final_mismatch.mean;
    record.total_evaluations = counter.total();
    return record;
}

void write_record(const RunRecord& record, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory " + dir.string() +
                          ": " + ec.message());

    save_config(record.config, dir / "config.json");
    write_ensemble_file(record.initial_ensemble, dir / "ensemble_iter0.csv",
                        "m_");
    for (const IterationRecord& it : record.iterations)
        write_ensemble_file(it.ensemble,
                            dir / ("ensemble_iter" +
                                   std::to_string(it.iteration) + ".csv"),
                            "m_");
    write_ensemble_file(record.final_forecast, dir / "forecast_final.csv",
                        "d_");

    json diag;
    diag["seed"] = record.config.seed;
    diag["n_e"] = record.config.n_e;
    la::Vector alphas;
    alphas.reserve(record.iterations.size());
    for (const IterationRecord& it : record.iterations)
        alphas.push_back(it.alpha);
    diag["alpha"] = alphas;
    diag["schedule_valid"] = record.schedule_status.ok;
    diag["schedule_residual"] = record.schedule_status.residual;
    diag["solver"] = record.config.solver.mode == SolverChoice::Mode::dense
                         ? "dense"
                         : "subspace";
    json iters = json::array();
    for (const IterationRecord& it : record.iterations) {
        json entry;
        entry["iteration"] = it.iteration;
        entry["alpha"] = it.alpha;
        entry["phi_mean"] = it.phi_mean;
        iters.push_back(std::move(entry));
    }
    diag["iterations"] = std::move(iters);
    diag["final_forecast_phi_mean"] = record.final_phi_mean;
    diag["forward_evaluations"] = record.total_evaluations;
    write_text_file(dir / "diagnostics.json", diag.dump(2) + "\n");

    write_text_file(dir / "mismatch.csv", summarize(record));
}

std::string summarize(const RunRecord& record) {
    std::string out = "iteration,member,phi\n";
    const auto append = [&out](std::size_t iteration, std::size_t member,
                               double phi) {
        out += std::to_string(iteration);
        out += ',';
        out += std::to_string(member);
        out += ',';
        out += csv::format_value(phi);
        out += '\n';
    };
    for (const IterationRecord& it : record.iterations)
        for (std::size_t j = 0; j < it.phi_members.size(); ++j)
            append(it.iteration, j, it.phi_members[j]);
    const std::size_t final_label = record.iterations.size() + 1;
    for (std::size_t j = 0; j < record.final_phi_members.size(); ++j)
        append(final_label, j, record.final_phi_members[j]);
    return out;
}

} // namespace esmda
