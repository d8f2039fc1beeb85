#include "imog/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "imog/diagnostics.hpp"
#include "imog/dynamics.hpp"
#include "imog/error.hpp"
#include "imog/problems.hpp"
#include "imog/sweep.hpp"
#include "imog/trajio.hpp"

namespace imog::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string shortest(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, end);
}

std::string tuple(const Vector& v) {
    std::string s = "(";
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (k) s += ", ";
        s += shortest(v(k));
    }
    return s + ")";
}

std::string tuple(const std::vector<double>& v) {
    return tuple(Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()))));
}

/// Accepts "1,2", "(1, 2)", "1 2" and the Unicode minus sign.
std::optional<std::vector<double>> parse_numbers(std::string text) {
    for (std::size_t pos; (pos = text.find("−")) != std::string::npos;) text.replace(pos, 3, "-");
    for (char& c : text) {
        if (c == '(' || c == ')' || c == ',' || c == ';' || c == '\t') c = ' ';
    }
    std::istringstream is(text);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) {
        double v = 0.0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v)) return std::nullopt;
        out.push_back(v);
    }
    if (out.empty()) return std::nullopt;
    return out;
}

// Values given on the command line; each one, when set, overrides the config file.
struct Flags {
    std::string config;
    std::optional<std::string> problem;
    std::optional<double> m, gamma, h, lambda, crit_tol, vel_tol;
    std::optional<std::string> u0, v0, scheme, plot;
    std::optional<std::uint64_t> max_steps, seed, runs;
    std::string out = "imog_out";
    int verbosity = 0;
};

void add_common(CLI::App* cmd, Flags& f, bool sweep) {
    cmd->add_option("--config", f.config, "JSON run configuration");
    cmd->add_option("--problem", f.problem, "builtin problem name or problem file");
    cmd->add_option("--m", f.m, "mass");
    cmd->add_option("--gamma", f.gamma, "damping");
    cmd->add_option("--h", f.h, "step size");
    cmd->add_option("--u0", f.u0, "initial position, comma separated");
    auto* v0 = cmd->add_option("--v0", f.v0, "initial velocity, comma separated");
    auto* lam = cmd->add_option("--lambda", f.lambda, "initial velocity lambda * s(u0), 0 <= lambda <= 1/gamma");
    v0->excludes(lam);
    cmd->add_option("--max-steps", f.max_steps, "step limit");
    cmd->add_option("--crit-tol", f.crit_tol, "stop when |s(u)| <= this (and |v| <= vel-tol)");
    cmd->add_option("--vel-tol", f.vel_tol, "velocity tolerance");
    cmd->add_option("--scheme", f.scheme, "imog or mog");
    cmd->add_option("--seed", f.seed, "random seed");
    if (sweep) cmd->add_option("--runs", f.runs, "number of sweep runs");
    cmd->add_option("--out", f.out, "output directory")->capture_default_str();
    cmd->add_option("--plot", f.plot, "emit a gnuplot script: trajectory2d, values, energies, pareto_cloud");
    cmd->add_flag("-v,--verbose", f.verbosity, "more output");
}

// Merged document: config file first, flags on top. Flag parse problems are
// collected alongside schema violations.
json build_document(const Flags& f, bool sweep, std::vector<std::string>& issues) {
    json doc = json::object();
    if (!f.config.empty()) doc = read_json_file(f.config);
    if (!doc.is_object()) return doc;
    auto put = [&](std::initializer_list<const char*> path, json value) {
        json* node = &doc;
        auto it = path.begin();
        for (std::size_t k = 0; k + 1 < path.size(); ++k, ++it) {
            if (!node->contains(*it) || !(*node)[*it].is_object()) (*node)[*it] = json::object();
            node = &(*node)[*it];
        }
        (*node)[*it] = std::move(value);
    };
    auto numbers = [&](const std::string& flag, const std::string& text) -> std::optional<json> {
        auto v = parse_numbers(text);
        if (!v) {
            issues.push_back(flag + ": expected comma-separated numbers, got '" + text + "'");
            return std::nullopt;
        }
        return json(*v);
    };
    if (f.problem) put({"problem"}, *f.problem);
    if (f.m) put({"params", "m"}, *f.m);
    if (f.gamma) put({"params", "gamma"}, *f.gamma);
    if (f.h) put({"params", "h"}, *f.h);
    if (f.u0) {
        if (auto v = numbers("--u0", *f.u0)) put({"initial", "u0"}, *v);
    }
    if (f.v0) {
        if (auto v = numbers("--v0", *f.v0)) put({"initial", "v0"}, *v);
    }
    if (f.lambda) {
        if (sweep) {
            put({"sweep", "velocity"}, json{{"lambda", *f.lambda}});
        } else {
            put({"initial", "v0"}, json{{"lambda", *f.lambda}});
        }
    }
    if (f.max_steps) put({"stop", "max_steps"}, *f.max_steps);
    if (f.crit_tol) put({"stop", "crit_tol"}, *f.crit_tol);
    if (f.vel_tol) put({"stop", "vel_tol"}, *f.vel_tol);
    if (f.scheme) put({"scheme", }, *f.scheme);
    if (f.seed) put({"seed"}, *f.seed);
    if (f.runs) put({"sweep", "n_runs"}, *f.runs);
    if (f.plot) {
        put({"outputs", "plot_kind"}, *f.plot);
        if (!doc["outputs"].contains("plot")) put({"outputs", "plot"}, "plot.gp");
    }
    return doc;
}

fs::path config_dir(const Flags& f) {
    return f.config.empty() ? fs::path() : fs::path(f.config).parent_path();
}

// Output names must stay inside the output directory.
void check_output_name(const std::string& field, const std::string& name, std::vector<std::string>& issues) {
    const fs::path p(name);
    bool escapes = name.empty() || p.is_absolute() || p.has_root_name();
    for (const auto& part : p) escapes = escapes || part == "..";
    if (escapes) issues.push_back(field + ": must be a relative path inside the output directory");
}

void report_issues(std::ostream& err, const std::vector<std::string>& issues) {
    err << "configuration error:\n";
    for (const auto& i : issues) err << "  " << i << "\n";
}

struct Prepared {
    LoadedProblem problem;
    DynState initial;
};

int exit_for(StopReason r) {
    switch (r) {
    case StopReason::criticality: return kOk;
    case StopReason::max_steps: return kMaxSteps;
    case StopReason::divergence: return kDivergence;
    }
    return kConfigError;
}

std::vector<std::string> gradient_failures(const VectorObjective& obj) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < obj.count(); ++i) {
        const auto& c = obj.component(i).gradient_check;
        if (c && !c->passed) {
            out.push_back("objective '" + obj.label(i) + "': supplied gradient disagrees with finite differences (max relative error " +
                          shortest(c->max_rel_error) + ")");
        }
    }
    return out;
}

int cmd_run(const Flags& f, std::ostream& out, std::ostream& err) {
    std::vector<std::string> issues;
    RunConfig cfg;
    std::optional<LoadedProblem> problem;
    DynState initial;
    try {
        const json doc = build_document(f, false, issues);
        try {
            cfg = parse_run_config(doc);
        } catch (const ConfigError& e) {
            issues.insert(issues.end(), e.issues().begin(), e.issues().end());
        }
        if (!issues.empty()) {
            report_issues(err, issues);
            return kConfigError;
        }
        problem = load_problem(cfg.problem, config_dir(f));
        const auto& obj = problem->objective;
        const auto d = static_cast<std::size_t>(obj.dim());
        if (cfg.u0.size() != d) {
            issues.push_back("initial.u0: has " + std::to_string(cfg.u0.size()) + " entries, problem dimension is " + std::to_string(d));
        }
        if (!cfg.initial_velocity.lambda && !cfg.initial_velocity.v0.empty() && cfg.initial_velocity.v0.size() != d) {
            issues.push_back("initial.v0: has " + std::to_string(cfg.initial_velocity.v0.size()) + " entries, problem dimension is " + std::to_string(d));
        }
        check_output_name("outputs.csv", cfg.outputs.csv, issues);
        check_output_name("outputs.report", cfg.outputs.report, issues);
        if (cfg.outputs.plot) {
            check_output_name("outputs.plot", *cfg.outputs.plot, issues);
            if (cfg.outputs.plot_kind == PlotKind::pareto_cloud) {
                issues.push_back("outputs.plot_kind: pareto_cloud is only available for sweeps");
            } else if (cfg.outputs.plot_kind == PlotKind::trajectory2d && d != 2) {
                issues.push_back("outputs.plot_kind: trajectory2d needs a 2-dimensional problem");
            }
        }
        for (auto& g : gradient_failures(obj)) issues.push_back("problem: " + g);
        if (!issues.empty()) {
            report_issues(err, issues);
            return kConfigError;
        }
        initial.t = cfg.params.t0;
        initial.u = Eigen::Map<const Vector>(cfg.u0.data(), static_cast<Eigen::Index>(d));
        if (cfg.initial_velocity.lambda) {
            initial.v = default_initial_velocity(obj, initial.u, *cfg.initial_velocity.lambda, cfg.params.damping);
        } else if (!cfg.initial_velocity.v0.empty()) {
            initial.v = Eigen::Map<const Vector>(cfg.initial_velocity.v0.data(), static_cast<Eigen::Index>(d));
        } else {
            initial.v = Vector::Zero(static_cast<Eigen::Index>(d));
        }
    } catch (const ConfigError& e) {
        report_issues(err, e.issues());
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    const auto& obj = problem->objective;
    const auto traj = integrate(obj, cfg.params, initial, cfg.stop, cfg.scheme);
    const auto report = analyze(traj, obj, problem->oracle.value_or(ParetoOracle{}));
    try {
        const fs::path dir(f.out);
        fs::create_directories(dir);
        write_trajectory_csv(traj, dir / cfg.outputs.csv);
        write_report_json(report, dir / cfg.outputs.report);
        if (cfg.outputs.plot) {
            const fs::path script = dir / *cfg.outputs.plot;
            const std::string csv_rel = fs::path(cfg.outputs.csv).lexically_relative(fs::path(*cfg.outputs.plot).parent_path()).generic_string();
            emit_plot_script(traj, csv_rel, script, cfg.outputs.plot_kind);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    out << "problem: " << problem->name << "\n";
    out << "steps: " << report.steps << "\n";
    out << "stop_reason: " << to_string(traj.stop_reason) << "\n";
    out << "terminal u: " << tuple(traj.back().u) << "\n";
    out << "terminal |s|: " << shortest(report.terminal_snorm) << "\n";
    out << "terminal |v|: " << shortest(report.terminal_vnorm) << "\n";
    if (report.pareto_distance) out << "pareto distance: " << shortest(*report.pareto_distance) << "\n";
    if (f.verbosity > 0) {
        out << "hp satisfied: " << (report.hp_satisfied ? "yes" : "no") << "\n";
        out << "energy increase (max step): " << shortest(report.energy_monotone_violation) << "\n";
        out << "envelope violation: " << shortest(report.envelope_violation) << "\n";
    }
    if (traj.stop_reason == StopReason::divergence) err << "diverged: " << traj.divergence_message << "\n";
    return exit_for(traj.stop_reason);
}

int cmd_sweep(const Flags& f, std::ostream& out, std::ostream& err) {
    std::vector<std::string> issues;
    SweepConfig cfg;
    std::optional<LoadedProblem> problem;
    try {
        const json doc = build_document(f, true, issues);
        try {
            cfg = parse_sweep_config(doc);
        } catch (const ConfigError& e) {
            issues.insert(issues.end(), e.issues().begin(), e.issues().end());
        }
        if (!issues.empty()) {
            report_issues(err, issues);
            return kConfigError;
        }
        problem = load_problem(cfg.run.problem, config_dir(f));
        const auto d = static_cast<std::size_t>(problem->objective.dim());
        if (cfg.box_min && cfg.box_min->size() != d) {
            issues.push_back("sweep.box: has " + std::to_string(cfg.box_min->size()) + " coordinates, problem dimension is " + std::to_string(d));
        }
        if (cfg.run.outputs.plot) {
            check_output_name("outputs.plot", *cfg.run.outputs.plot, issues);
            if (cfg.run.outputs.plot_kind != PlotKind::pareto_cloud) {
                issues.push_back("outputs.plot_kind: sweeps emit pareto_cloud plots");
            } else if (d != 2) {
                issues.push_back("outputs.plot_kind: pareto_cloud needs a 2-dimensional problem");
            }
        }
        for (auto& g : gradient_failures(problem->objective)) issues.push_back("problem: " + g);
        if (!issues.empty()) {
            report_issues(err, issues);
            return kConfigError;
        }
    } catch (const ConfigError& e) {
        report_issues(err, e.issues());
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    const fs::path dir(f.out);
    SweepResult result;
    try {
        fs::create_directories(dir);
        result = run_sweep(*problem, cfg, dir);
        write_sweep_summary(result, dir);
        write_sweep_index(result, dir);
        if (cfg.run.outputs.plot) emit_sweep_plot_script(result, dir, *cfg.run.outputs.plot);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    std::size_t converged = 0, diverged = 0;
    for (const auto& r : result.runs) {
        converged += r.stop_reason == StopReason::criticality;
        diverged += r.stop_reason == StopReason::divergence;
        if (f.verbosity > 0) {
            out << "run " << r.run << ": " << to_string(r.stop_reason) << " after " << r.steps << " steps at "
                << tuple(r.u_terminal) << "\n";
        }
    }
    out << "runs: " << result.runs.size() << ", converged: " << converged << ", diverged: " << diverged << "\n";
    out << "summary: " << (dir / "summary.csv").string() << "\n";
    if (converged == result.runs.size()) return kOk;
    return diverged > 0 ? kDivergence : kMaxSteps;
}

int cmd_check(const Flags& f, std::ostream& out, std::ostream& err) {
    std::vector<std::string> issues;
    SweepConfig cfg;
    std::optional<LoadedProblem> problem;
    try {
        const json doc = build_document(f, true, issues);
        try {
            cfg = parse_sweep_config(doc);
        } catch (const ConfigError& e) {
            issues.insert(issues.end(), e.issues().begin(), e.issues().end());
        }
        if (!issues.empty()) {
            report_issues(err, issues);
            return kConfigError;
        }
        problem = load_problem(cfg.run.problem, config_dir(f));
    } catch (const ConfigError& e) {
        report_issues(err, e.issues());
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    const auto& obj = problem->objective;
    const auto& p = cfg.run.params;
    out << "problem: " << problem->name << " (d = " << obj.dim() << ", q = " << obj.count() << ")\n";
    out << "params: m = " << shortest(p.mass) << ", gamma = " << shortest(p.damping) << "\n";
    out << "admissible lambda for v0 = lambda s(u0): [0, " << shortest(1.0 / p.damping) << "]\n";

    bool gradients_ok = true;
    for (std::size_t i = 0; i < obj.count(); ++i) {
        const auto& c = obj.component(i);
        if (c.gradient_check) {
            out << "gradient check " << c.label << ": " << (c.gradient_check->passed ? "ok" : "FAILED")
                << " (max relative error " << shortest(c.gradient_check->max_rel_error) << ")\n";
            gradients_ok = gradients_ok && c.gradient_check->passed;
        } else if (c.finite_difference_gradient) {
            out << "gradient " << c.label << ": finite differences\n";
        }
    }

    HpReport hp;
    try {
        hp = hp_report(obj, p);
    } catch (const MissingLipschitz& e) {
        err << "error: " << e.what() << "\n";
        err << "add a \"lipschitz\" bound for every objective in the problem file to check gamma^2 > m L_i\n";
        return kMissingLipschitz;
    }
    for (std::size_t i = 0; i < hp.entries.size(); ++i) {
        const auto& e = hp.entries[i];
        out << "HP " << obj.label(i) << ": L = " << shortest(e.lipschitz) << ", margin gamma^2 - m L = "
            << shortest(e.margin) << " -> " << (e.satisfied ? "satisfied" : "VIOLATED") << "\n";
    }
    out << "HP: " << (hp.satisfied() ? "satisfied" : "not satisfied") << "\n";
    return hp.satisfied() && gradients_ok ? kOk : kCheckFailed;
}

int cmd_min_norm(const std::vector<std::string>& vectors, const std::string& file, double tol, std::ostream& out,
                 std::ostream& err) {
    std::vector<Vector> gs;
    auto add = [&](const std::string& text) {
        auto v = parse_numbers(text);
        if (!v) throw InvalidInput("cannot parse vector '" + text + "'");
        gs.push_back(Eigen::Map<const Vector>(v->data(), static_cast<Eigen::Index>(v->size())));
    };
    try {
        for (const auto& v : vectors) add(v);
        if (!file.empty()) {
            std::ifstream in(file);
            if (!in) throw IoError("cannot open '" + file + "'");
            std::string line;
            while (std::getline(in, line)) {
                if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
                add(line);
            }
        }
        if (gs.empty()) throw InvalidInput("no vectors given");
        const auto r = min_norm_point(GradientBundle(gs), tol);
        out << "point: " << tuple(r.point) << "\n";
        out << "weights: " << tuple(r.weights.theta) << "\n";
        out << "norm: " << shortest(r.norm) << "\n";
        return kOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
}

int cmd_list_problems(std::ostream& out) {
    for (const auto& info : builtin_problems()) {
        out << info.name << "\n";
        out << "  dim: " << info.dim << ", objectives: " << info.count << "\n";
        out << "  lipschitz: " << tuple(info.lipschitz) << "\n";
        out << "  pareto set: " << info.pareto_set << "\n";
        out << "  " << info.description << "\n";
    }
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Inertial multi-objective gradient dynamics", "imog"};
    app.require_subcommand(1);
    // "-h" would collide with the step-size flag --h.
    app.set_help_flag("--help", "print help");

    Flags run_flags, sweep_flags, check_flags;
    auto* run_cmd = app.add_subcommand("run", "integrate one trajectory");
    add_common(run_cmd, run_flags, false);
    auto* sweep_cmd = app.add_subcommand("sweep", "integrate seeded random starts");
    add_common(sweep_cmd, sweep_flags, true);
    auto* check_cmd = app.add_subcommand("check", "check gamma^2 > m L_i and supplied gradients");
    add_common(check_cmd, check_flags, false);

    auto* mn_cmd = app.add_subcommand("min-norm", "minimum-norm point of the convex hull of vectors");
    std::vector<std::string> mn_vectors;
    std::string mn_file;
    double mn_tol = kDefaultMinNormTol;
    mn_cmd->add_option("vectors", mn_vectors, "vectors such as (1,0) or 1,0");
    mn_cmd->add_option("--file", mn_file, "file with one vector per line");
    mn_cmd->add_option("--tol", mn_tol, "duality gap tolerance")->check(CLI::PositiveNumber);

    auto* list_cmd = app.add_subcommand("list-problems", "list builtin problems");

    std::vector<std::string> argv_store{"imog"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    if (*run_cmd) return cmd_run(run_flags, out, err);
    if (*sweep_cmd) return cmd_sweep(sweep_flags, out, err);
    if (*check_cmd) return cmd_check(check_flags, out, err);
    if (*mn_cmd) return cmd_min_norm(mn_vectors, mn_file, mn_tol, out, err);
    if (*list_cmd) return cmd_list_problems(out);
    return kConfigError;
}

} // namespace imog::cli
