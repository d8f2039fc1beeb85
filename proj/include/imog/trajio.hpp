#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "imog/diagnostics.hpp"
#include "imog/state.hpp"

namespace imog {

enum class PlotKind { trajectory2d, values, energies, pareto_cloud };

std::string_view to_string(PlotKind k);
std::optional<PlotKind> parse_plot_kind(std::string_view s);

/// Either an explicit v0 or v0 = λ s(u0).
struct InitialVelocity {
    std::vector<double> v0;
    std::optional<double> lambda;
};

struct RunOutputs {
    std::string csv = "trajectory.csv";
    std::string report = "report.json";
    std::optional<std::string> plot;
    PlotKind plot_kind = PlotKind::trajectory2d;
};

/// One integration, as read from JSON:
///
///     {"problem": "biquadratic",
///      "params": {"m": 1, "gamma": 1, "h": 0.01, "t0": 0},
///      "initial": {"u0": [3, 2], "v0": [0, 0] | {"lambda": 1}},
///      "stop": {"max_steps": 1000000, "crit_tol": 1e-6, "vel_tol": 1e-6},
///      "scheme": "imog", "seed": 0,
///      "outputs": {"csv": "...", "report": "...", "plot": "...", "plot_kind": "trajectory2d"}}
///
/// Only "problem" and (outside sweeps) "initial.u0" are required.
struct RunConfig {
    std::string problem;
    DynParams params;
    std::vector<double> u0;
    InitialVelocity initial_velocity;
    StopRule stop;
    Scheme scheme = Scheme::imog;
    std::uint64_t seed = 0;
    RunOutputs outputs;
};

/// Velocity rule for sampled starts: zero, or λ s(u0).
struct VelocityRule {
    std::optional<double> lambda;
};

/// A RunConfig plus a "sweep" object:
///
///     "sweep": {"n_runs": 20, "box": {"min": [-4, -4], "max": [4, 4]},
///               "velocity": "zero" | {"lambda": 0.5}, "parallelism": 4}
///
/// A missing box defaults to [-4, 4]^d once the problem dimension is known.
struct SweepConfig {
    RunConfig run;
    std::size_t n_runs = 1;
    std::optional<std::vector<double>> box_min;
    std::optional<std::vector<double>> box_max;
    VelocityRule velocity;
    std::size_t parallelism = 1;
};

/// Validate a run configuration, collecting every violation. Throws ConfigError.
RunConfig parse_run_config(const nlohmann::json& doc);
SweepConfig parse_sweep_config(const nlohmann::json& doc);

/// Throws IoError when unreadable, ConfigError on JSON syntax (with line/column) or schema errors.
nlohmann::json read_json_file(const std::filesystem::path& path);
RunConfig read_run_config(const std::filesystem::path& path);
SweepConfig read_sweep_config(const std::filesystem::path& path);

/// Problem definition file:
///
///     {"dim": 2, "objectives": [
///        {"name": "f1", "expr": "x0^2 + x1^2", "grad": ["2*x0", "2*x1"], "lipschitz": 2},
///        {"name": "f2", "builtin": "quadratic_linear/f2"}]}
///
/// Throws ConfigError listing every violation.
VectorObjective parse_problem(const nlohmann::json& doc);
VectorObjective read_problem_file(const std::filesystem::path& path);

/// A builtin name, or else a problem file path resolved against `base_dir`.
struct LoadedProblem {
    std::string name;
    bool builtin = false;
    VectorObjective objective;
    std::optional<ParetoOracle> oracle;
};
LoadedProblem load_problem(const std::string& problem, const std::filesystem::path& base_dir = {});

/// Column names: step,t,u0..u{d-1},v0..v{d-1},f1..f{q},E1..E{q},snorm,theta1..theta{q}
std::vector<std::string> trajectory_csv_header(Eigen::Index dim, std::size_t count);

/// One row per state, 17 significant digits.
void write_trajectory_csv(const Trajectory& trajectory, const std::filesystem::path& path);

/// Inverse of write_trajectory_csv. Dimensions come from the header; params.step
/// and params.t0 are recovered from the time column, the rest stay default.
Trajectory read_trajectory_csv(const std::filesystem::path& path);

nlohmann::json to_json(const TrajectoryReport& report);
void write_report_json(const TrajectoryReport& report, const std::filesystem::path& path);

/// gnuplot script over the CSV at `csv_relpath` (relative to the script's directory).
/// trajectory2d needs d = 2. Throws InvalidInput for pareto_cloud, which is for sweeps.
void emit_plot_script(const Trajectory& trajectory, const std::string& csv_relpath,
                      const std::filesystem::path& path, PlotKind kind);

/// Terminal data of one sweep member.
struct SweepRunResult {
    std::size_t run = 0;
    std::uint64_t seed = 0;
    Vector u_initial;
    Vector u_terminal;
    ObjectiveVector values;
    double snorm = 0.0;
    StopReason stop_reason = StopReason::max_steps;
    std::optional<double> pareto_distance;
    std::size_t steps = 0;
    std::string csv;
};

struct SweepResult {
    std::string problem;
    Eigen::Index dim = 0;
    std::size_t count = 0;
    std::uint64_t base_seed = 0;
    std::vector<SweepRunResult> runs;
};

/// summary.csv (run,seed,u...,f...,snorm,stop_reason[,pareto_distance]) and
/// nondominated.csv (the same columns, restricted to the efficient subset) in `dir`.
void write_sweep_summary(const SweepResult& result, const std::filesystem::path& dir);

/// index.json listing the per-run files.
void write_sweep_index(const SweepResult& result, const std::filesystem::path& dir);

/// pareto_cloud script: initial points (×), terminal points (⊕), non-dominated subset.
/// Needs d = 2. Paths are relative to `dir`, where the script is written as `name`.
void emit_sweep_plot_script(const SweepResult& result, const std::filesystem::path& dir, const std::string& name);

} // namespace imog
