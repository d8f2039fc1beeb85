#include "imog/trajio.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "imog/error.hpp"
#include "imog/expression.hpp"
#include "imog/problems.hpp"

namespace imog {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(PlotKind k) {
    switch (k) {
    case PlotKind::trajectory2d: return "trajectory2d";
    case PlotKind::values: return "values";
    case PlotKind::energies: return "energies";
    case PlotKind::pareto_cloud: return "pareto_cloud";
    }
    return "unknown";
}

std::optional<PlotKind> parse_plot_kind(std::string_view s) {
    for (auto k : {PlotKind::trajectory2d, PlotKind::values, PlotKind::energies, PlotKind::pareto_cloud}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_short(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// Collects schema violations so that a single pass reports all of them.
class Validator {
public:
    void add(const std::string& path, const std::string& msg) { issues_.push_back(path + ": " + msg); }
    bool ok() const { return issues_.empty(); }
    void throw_if_failed() const {
        if (!issues_.empty()) throw ConfigError(issues_);
    }

    bool object(const json& j, const std::string& path) {
        if (j.is_object()) return true;
        add(path, "expected an object");
        return false;
    }

    void known_keys(const json& j, const std::string& prefix, std::initializer_list<std::string_view> allowed) {
        for (const auto& [key, _] : j.items()) {
            bool known = false;
            for (auto a : allowed) known = known || key == a;
            if (!known) add(join(prefix, key), "unknown field");
        }
    }

    static std::string join(const std::string& prefix, const std::string& key) {
        return prefix.empty() ? key : prefix + "." + key;
    }

    std::optional<double> number(const json& j, const std::string& path) {
        if (!j.is_number()) {
            add(path, "expected a number");
            return std::nullopt;
        }
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            add(path, "must be finite");
            return std::nullopt;
        }
        return v;
    }

    std::optional<double> positive(const json& j, const std::string& path) {
        auto v = number(j, path);
        if (v && !(*v > 0.0)) {
            add(path, "must be > 0 (got " + fmt_short(*v) + ")");
            return std::nullopt;
        }
        return v;
    }

    std::optional<double> nonnegative(const json& j, const std::string& path) {
        auto v = number(j, path);
        if (v && !(*v >= 0.0)) {
            add(path, "must be >= 0 (got " + fmt_short(*v) + ")");
            return std::nullopt;
        }
        return v;
    }

    std::optional<std::uint64_t> unsigned_int(const json& j, const std::string& path) {
        if (j.is_number_unsigned()) return j.get<std::uint64_t>();
        if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
        add(path, "expected a nonnegative integer");
        return std::nullopt;
    }

    std::optional<std::string> string(const json& j, const std::string& path) {
        if (!j.is_string()) {
            add(path, "expected a string");
            return std::nullopt;
        }
        return j.get<std::string>();
    }

    std::optional<std::vector<double>> vector(const json& j, const std::string& path) {
        if (!j.is_array() || j.empty()) {
            add(path, "expected a nonempty array of numbers");
            return std::nullopt;
        }
        std::vector<double> out;
        bool good = true;
        for (std::size_t k = 0; k < j.size(); ++k) {
            auto v = number(j[k], path + "[" + std::to_string(k) + "]");
            good = good && v.has_value();
            if (v) out.push_back(*v);
        }
        if (!good) return std::nullopt;
        return out;
    }

private:
    std::vector<std::string> issues_;
};

std::optional<double> lambda_field(Validator& val, const json& j, const std::string& path, double gamma) {
    if (!val.object(j, path)) return std::nullopt;
    val.known_keys(j, path, {"lambda"});
    if (!j.contains("lambda")) {
        val.add(path + ".lambda", "required");
        return std::nullopt;
    }
    auto lam = val.number(j["lambda"], path + ".lambda");
    if (lam && gamma > 0.0) {
        const double upper = 1.0 / gamma;
        if (!(*lam >= 0.0 && *lam <= upper)) {
            val.add(path + ".lambda", fmt_short(*lam) + " outside the admissible interval [0, " + fmt_short(upper) +
                                          "] = [0, 1/gamma]");
            return std::nullopt;
        }
    }
    return lam;
}

RunConfig parse_run_common(const json& doc, Validator& val, bool sweep) {
    RunConfig cfg;
    if (!val.object(doc, "config")) return cfg;
    if (sweep) {
        val.known_keys(doc, "", {"problem", "params", "initial", "stop", "scheme", "seed", "outputs", "sweep"});
    } else {
        val.known_keys(doc, "", {"problem", "params", "initial", "stop", "scheme", "seed", "outputs"});
    }

    if (!doc.contains("problem")) {
        val.add("problem", "required");
    } else if (auto s = val.string(doc["problem"], "problem")) {
        if (s->empty()) val.add("problem", "must not be empty");
        cfg.problem = *s;
    }

    bool gamma_valid = true;
    if (doc.contains("params")) {
        const auto& p = doc["params"];
        if (val.object(p, "params")) {
            val.known_keys(p, "params", {"m", "gamma", "h", "t0"});
            if (p.contains("m")) {
                if (auto v = val.positive(p["m"], "params.m")) cfg.params.mass = *v;
            }
            if (p.contains("gamma")) {
                auto v = val.positive(p["gamma"], "params.gamma");
                gamma_valid = v.has_value();
                if (v) cfg.params.damping = *v;
            }
            if (p.contains("h")) {
                if (auto v = val.positive(p["h"], "params.h")) cfg.params.step = *v;
            }
            if (p.contains("t0")) {
                if (auto v = val.number(p["t0"], "params.t0")) cfg.params.t0 = *v;
            }
        }
    }

    if (doc.contains("initial")) {
        const auto& in = doc["initial"];
        if (val.object(in, "initial")) {
            val.known_keys(in, "initial", {"u0", "v0"});
            if (in.contains("u0")) {
                if (auto u = val.vector(in["u0"], "initial.u0")) cfg.u0 = *u;
            } else if (!sweep) {
                val.add("initial.u0", "required");
            }
            if (in.contains("v0")) {
                const auto& v = in["v0"];
                if (v.is_object()) {
                    cfg.initial_velocity.lambda =
                        lambda_field(val, v, "initial.v0", gamma_valid ? cfg.params.damping : -1.0);
                } else if (auto vv = val.vector(v, "initial.v0")) {
                    cfg.initial_velocity.v0 = *vv;
                    if (!cfg.u0.empty() && vv->size() != cfg.u0.size()) {
                        val.add("initial.v0", "has " + std::to_string(vv->size()) + " entries but u0 has " +
                                                  std::to_string(cfg.u0.size()));
                    }
                }
            }
        }
    } else if (!sweep) {
        val.add("initial.u0", "required");
    }

    if (doc.contains("stop")) {
        const auto& s = doc["stop"];
        if (val.object(s, "stop")) {
            val.known_keys(s, "stop", {"max_steps", "crit_tol", "vel_tol"});
            if (s.contains("max_steps")) {
                if (auto n = val.unsigned_int(s["max_steps"], "stop.max_steps")) {
                    if (*n < 1) {
                        val.add("stop.max_steps", "must be >= 1");
                    } else {
                        cfg.stop.max_steps = *n;
                    }
                }
            }
            if (s.contains("crit_tol")) {
                if (auto v = val.positive(s["crit_tol"], "stop.crit_tol")) cfg.stop.crit_tol = *v;
            }
            if (s.contains("vel_tol")) {
                if (auto v = val.nonnegative(s["vel_tol"], "stop.vel_tol")) cfg.stop.vel_tol = *v;
            }
        }
    }

    if (doc.contains("scheme")) {
        if (auto s = val.string(doc["scheme"], "scheme")) {
            if (auto sc = parse_scheme(*s)) {
                cfg.scheme = *sc;
            } else {
                val.add("scheme", "must be \"imog\" or \"mog\"");
            }
        }
    }

    if (doc.contains("seed")) {
        if (auto s = val.unsigned_int(doc["seed"], "seed")) cfg.seed = *s;
    }

    if (doc.contains("outputs")) {
        const auto& o = doc["outputs"];
        if (val.object(o, "outputs")) {
            val.known_keys(o, "outputs", {"csv", "report", "plot", "plot_kind"});
            if (o.contains("csv")) {
                if (auto s = val.string(o["csv"], "outputs.csv")) cfg.outputs.csv = *s;
            }
            if (o.contains("report")) {
                if (auto s = val.string(o["report"], "outputs.report")) cfg.outputs.report = *s;
            }
            if (o.contains("plot")) {
                if (auto s = val.string(o["plot"], "outputs.plot")) cfg.outputs.plot = *s;
            }
            if (o.contains("plot_kind")) {
                if (auto s = val.string(o["plot_kind"], "outputs.plot_kind")) {
                    if (auto k = parse_plot_kind(*s)) {
                        cfg.outputs.plot_kind = *k;
                    } else {
                        val.add("outputs.plot_kind", "must be one of trajectory2d, values, energies, pareto_cloud");
                    }
                }
            }
        }
    }
    return cfg;
}

} // namespace

RunConfig parse_run_config(const json& doc) {
    Validator val;
    RunConfig cfg = parse_run_common(doc, val, false);
    val.throw_if_failed();
    return cfg;
}

SweepConfig parse_sweep_config(const json& doc) {
    Validator val;
    SweepConfig cfg;
    cfg.run = parse_run_common(doc, val, true);
    if (doc.is_object() && doc.contains("sweep")) {
        const auto& s = doc["sweep"];
        if (val.object(s, "sweep")) {
            val.known_keys(s, "sweep", {"n_runs", "box", "velocity", "parallelism"});
            if (s.contains("n_runs")) {
                if (auto n = val.unsigned_int(s["n_runs"], "sweep.n_runs")) {
                    if (*n < 1) {
                        val.add("sweep.n_runs", "must be >= 1");
                    } else {
                        cfg.n_runs = *n;
                    }
                }
            }
            if (s.contains("box")) {
                const auto& b = s["box"];
                if (val.object(b, "sweep.box")) {
                    val.known_keys(b, "sweep.box", {"min", "max"});
                    if (!b.contains("min")) val.add("sweep.box.min", "required");
                    if (!b.contains("max")) val.add("sweep.box.max", "required");
                    if (b.contains("min")) cfg.box_min = val.vector(b["min"], "sweep.box.min");
                    if (b.contains("max")) cfg.box_max = val.vector(b["max"], "sweep.box.max");
                    if (cfg.box_min && cfg.box_max) {
                        if (cfg.box_min->size() != cfg.box_max->size()) {
                            val.add("sweep.box", "min and max have different lengths");
                        } else {
                            for (std::size_t k = 0; k < cfg.box_min->size(); ++k) {
                                if ((*cfg.box_min)[k] > (*cfg.box_max)[k]) {
                                    val.add("sweep.box.min[" + std::to_string(k) + "]", "exceeds the matching max");
                                }
                            }
                        }
                    }
                }
            }
            if (s.contains("velocity")) {
                const auto& v = s["velocity"];
                if (v.is_string()) {
                    if (v.get<std::string>() != "zero") val.add("sweep.velocity", "must be \"zero\" or {\"lambda\": x}");
                } else {
                    cfg.velocity.lambda = lambda_field(val, v, "sweep.velocity", cfg.run.params.damping);
                }
            }
            if (s.contains("parallelism")) {
                if (auto n = val.unsigned_int(s["parallelism"], "sweep.parallelism")) {
                    cfg.parallelism = std::max<std::uint64_t>(1, *n);
                }
            }
        }
    }
    val.throw_if_failed();
    return cfg;
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError({path.string() + ": " + e.what()});
    }
}

RunConfig read_run_config(const fs::path& path) { return parse_run_config(read_json_file(path)); }

SweepConfig read_sweep_config(const fs::path& path) { return parse_sweep_config(read_json_file(path)); }

VectorObjective parse_problem(const json& doc) {
    Validator val;
    if (!val.object(doc, "problem")) val.throw_if_failed();
    val.known_keys(doc, "", {"dim", "objectives"});
    Eigen::Index dim = 0;
    if (!doc.contains("dim")) {
        val.add("dim", "required");
    } else if (auto d = val.unsigned_int(doc["dim"], "dim")) {
        if (*d < 1) {
            val.add("dim", "must be >= 1");
        } else {
            dim = static_cast<Eigen::Index>(*d);
        }
    }
    std::vector<ScalarObjective> parts;
    if (!doc.contains("objectives")) {
        val.add("objectives", "required");
    } else if (!doc["objectives"].is_array() || doc["objectives"].empty()) {
        val.add("objectives", "expected a nonempty array");
    } else {
        const auto& objs = doc["objectives"];
        for (std::size_t i = 0; i < objs.size(); ++i) {
            const std::string path = "objectives[" + std::to_string(i) + "]";
            const auto& o = objs[i];
            if (!val.object(o, path)) continue;
            val.known_keys(o, path, {"name", "expr", "builtin", "grad", "lipschitz"});
            std::string name = "f" + std::to_string(i + 1);
            if (!o.contains("name")) {
                val.add(path + ".name", "required");
            } else if (auto s = val.string(o["name"], path + ".name")) {
                name = *s;
            }
            std::optional<double> lip;
            if (o.contains("lipschitz")) lip = val.nonnegative(o["lipschitz"], path + ".lipschitz");
            const bool has_expr = o.contains("expr");
            const bool has_builtin = o.contains("builtin");
            if (has_expr == has_builtin) {
                val.add(path, "exactly one of \"expr\" or \"builtin\" is required");
                continue;
            }
            if (dim < 1) continue;
            if (has_builtin) {
                if (o.contains("grad")) val.add(path + ".grad", "not allowed with \"builtin\"");
                auto ref = val.string(o["builtin"], path + ".builtin");
                if (!ref) continue;
                try {
                    ScalarObjective part = builtin_component(*ref);
                    if (dim != 2) val.add(path + ".builtin", "builtin objectives are defined on R^2, dim is " + std::to_string(dim));
                    part.label = name;
                    if (lip) part.lipschitz = lip;
                    parts.push_back(std::move(part));
                } catch (const NotFound& e) {
                    val.add(path + ".builtin", e.what());
                }
                continue;
            }
            auto src = val.string(o["expr"], path + ".expr");
            if (!src) continue;
            std::optional<ExpressionObjective> expr;
            try {
                expr = parse_expression(*src, dim);
            } catch (const SyntaxError& e) {
                val.add(path + ".expr", e.what());
                continue;
            }
            std::optional<std::vector<ExpressionObjective>> grad;
            if (o.contains("grad")) {
                const auto& g = o["grad"];
                if (!g.is_array() || static_cast<Eigen::Index>(g.size()) != dim) {
                    val.add(path + ".grad", "expected an array of " + std::to_string(dim) + " expressions");
                    continue;
                }
                grad.emplace();
                bool good = true;
                for (std::size_t k = 0; k < g.size(); ++k) {
                    const std::string gpath = path + ".grad[" + std::to_string(k) + "]";
                    auto gs = val.string(g[k], gpath);
                    if (!gs) {
                        good = false;
                        continue;
                    }
                    try {
                        grad->push_back(parse_expression(*gs, dim));
                    } catch (const SyntaxError& e) {
                        val.add(gpath, e.what());
                        good = false;
                    }
                }
                if (!good) continue;
            }
            parts.push_back(make_expression_objective(name, std::move(*expr), std::move(grad), lip, dim));
        }
    }
    val.throw_if_failed();
    return VectorObjective(dim, std::move(parts));
}

VectorObjective read_problem_file(const fs::path& path) { return parse_problem(read_json_file(path)); }

LoadedProblem load_problem(const std::string& problem, const fs::path& base_dir) {
    for (const auto& info : builtin_problems()) {
        if (info.name == problem) {
            return LoadedProblem{problem, true, builtin_problem(problem), pareto_oracle(problem)};
        }
    }
    fs::path path(problem);
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    if (!fs::exists(path)) {
        throw NotFound("'" + problem + "' is neither a builtin problem nor an existing problem file");
    }
    return LoadedProblem{path.stem().string(), false, read_problem_file(path), std::nullopt};
}

std::vector<std::string> trajectory_csv_header(Eigen::Index dim, std::size_t count) {
    std::vector<std::string> h{"step", "t"};
    for (Eigen::Index k = 0; k < dim; ++k) h.push_back("u" + std::to_string(k));
    for (Eigen::Index k = 0; k < dim; ++k) h.push_back("v" + std::to_string(k));
    for (std::size_t i = 1; i <= count; ++i) h.push_back("f" + std::to_string(i));
    for (std::size_t i = 1; i <= count; ++i) h.push_back("E" + std::to_string(i));
    h.push_back("snorm");
    for (std::size_t i = 1; i <= count; ++i) h.push_back("theta" + std::to_string(i));
    return h;
}

void write_trajectory_csv(const Trajectory& trajectory, const fs::path& path) {
    if (trajectory.states.empty()) throw InvalidInput("write_trajectory_csv: empty trajectory");
    const Eigen::Index d = trajectory.states.front().u.size();
    const std::size_t q = trajectory.diagnostics.front().values.size();
    std::string out;
    const auto header = trajectory_csv_header(d, q);
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (k) out += ',';
        out += header[k];
    }
    out += '\n';
    for (std::size_t n = 0; n < trajectory.states.size(); ++n) {
        const auto& s = trajectory.states[n];
        const auto& dg = trajectory.diagnostics[n];
        out += std::to_string(n);
        out += ',';
        out += fmt17(s.t);
        for (Eigen::Index k = 0; k < d; ++k) out += ',' + fmt17(s.u(k));
        for (Eigen::Index k = 0; k < d; ++k) out += ',' + fmt17(s.v(k));
        for (double f : dg.values.values) out += ',' + fmt17(f);
        for (double e : dg.energies.values) out += ',' + fmt17(e);
        out += ',' + fmt17(dg.snorm);
        for (double th : dg.weights.theta) out += ',' + fmt17(th);
        out += '\n';
    }
    write_text(path, out);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::size_t count_prefixed(const std::vector<std::string>& header, const std::string& prefix) {
    std::size_t n = 0;
    for (const auto& h : header) {
        if (h.size() > prefix.size() && h.compare(0, prefix.size(), prefix) == 0 &&
            std::all_of(h.begin() + static_cast<std::ptrdiff_t>(prefix.size()), h.end(),
                        [](char c) { return c >= '0' && c <= '9'; })) {
            ++n;
        }
    }
    return n;
}

} // namespace

Trajectory read_trajectory_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError("'" + path.string() + "' is empty");
    const auto header = split_csv(line);
    const auto d = static_cast<Eigen::Index>(count_prefixed(header, "u"));
    const std::size_t q = count_prefixed(header, "f");
    if (d < 1 || q < 1 || header != trajectory_csv_header(d, q)) {
        throw IoError("'" + path.string() + "' does not carry a trajectory header");
    }
    Trajectory traj;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size()) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(header.size()) + " columns");
        }
        std::vector<double> x(cells.size());
        for (std::size_t k = 0; k < cells.size(); ++k) {
            char* end = nullptr;
            x[k] = std::strtod(cells[k].c_str(), &end);
            if (end == cells[k].c_str() || *end != '\0') {
                throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed number '" + cells[k] + "'");
            }
        }
        std::size_t c = 1;
        DynState s;
        s.t = x[c++];
        s.u.resize(d);
        s.v.resize(d);
        for (Eigen::Index k = 0; k < d; ++k) s.u(k) = x[c++];
        for (Eigen::Index k = 0; k < d; ++k) s.v(k) = x[c++];
        StepDiagnostics dg;
        for (std::size_t i = 0; i < q; ++i) dg.values.values.push_back(x[c++]);
        for (std::size_t i = 0; i < q; ++i) dg.energies.values.push_back(x[c++]);
        dg.snorm = x[c++];
        for (std::size_t i = 0; i < q; ++i) dg.weights.theta.push_back(x[c++]);
        traj.states.push_back(std::move(s));
        traj.diagnostics.push_back(std::move(dg));
    }
    if (!traj.states.empty()) traj.params.t0 = traj.states.front().t;
    if (traj.states.size() >= 2) traj.params.step = traj.states[1].t - traj.states[0].t;
    return traj;
}

json to_json(const TrajectoryReport& r) {
    json j;
    j["steps"] = r.steps;
    j["stop_reason"] = std::string(to_string(r.stop_reason));
    j["energy_monotone_violation"] = r.energy_monotone_violation;
    j["energy_increase_total"] = r.energy_increase_total;
    j["envelope_violation"] = r.envelope_violation;
    j["terminal_snorm"] = r.terminal_snorm;
    j["terminal_vnorm"] = r.terminal_vnorm;
    j["terminal_residual"] = r.terminal_residual;
    j["value_limits"] = r.value_limits;
    j["pareto_distance"] = r.pareto_distance ? json(*r.pareto_distance) : json(nullptr);
    j["oscillation_count"] = r.oscillation_count;
    j["hp_satisfied"] = r.hp_satisfied;
    json hp = json::array();
    for (const auto& e : r.hp.entries) {
        hp.push_back({{"lipschitz", e.lipschitz}, {"estimated", e.estimated}, {"margin", e.margin},
                      {"satisfied", e.satisfied}});
    }
    j["hp"] = hp;
    return j;
}

void write_report_json(const TrajectoryReport& report, const fs::path& path) {
    write_text(path, to_json(report).dump(2) + "\n");
}

namespace {

std::string gnuplot_preamble(const std::string& title, const std::string& png) {
    std::string s;
    s += "# gnuplot script; run with: gnuplot <this file>\n";
    s += "set terminal pngcairo size 900,700\n";
    s += "set output '" + png + "'\n";
    s += "set datafile separator ','\n";
    s += "set key autotitle columnhead\n";
    s += "set title '" + title + "'\n";
    s += "set grid\n";
    return s;
}

std::string png_name(const fs::path& script) {
    auto p = script.filename();
    p.replace_extension(".png");
    return p.string();
}

} // namespace

void emit_plot_script(const Trajectory& trajectory, const std::string& csv, const fs::path& path, PlotKind kind) {
    if (trajectory.states.empty()) throw InvalidInput("emit_plot_script: empty trajectory");
    const Eigen::Index d = trajectory.states.front().u.size();
    const std::size_t q = trajectory.diagnostics.front().values.size();
    const std::size_t last = trajectory.states.size() - 1;
    std::string s;
    switch (kind) {
    case PlotKind::trajectory2d: {
        if (d != 2) throw InvalidInput("trajectory2d plots need d = 2, got d = " + std::to_string(d));
        s = gnuplot_preamble("trajectory (x initial, (+) limit)", png_name(path));
        s += "set xlabel 'u0'\nset ylabel 'u1'\nset size ratio -1\n";
        const std::string end = std::to_string(last);
        s += "plot '" + csv + "' using 3:4 with lines lw 1.5 title 'u(t)', \\\n";
        s += "     '" + csv + "' every ::0::0 using 3:4 with points pt 2 ps 2 lc rgb 'black' title 'initial', \\\n";
        s += "     '" + csv + "' every ::" + end + "::" + end +
             " using 3:4 with points pt 6 ps 2 lc rgb 'red' title 'terminal', \\\n";
        s += "     '" + csv + "' every ::" + end + "::" + end + " using 3:4 with points pt 1 ps 2 lc rgb 'red' notitle\n";
        break;
    }
    case PlotKind::values:
    case PlotKind::energies: {
        const bool values = kind == PlotKind::values;
        s = gnuplot_preamble(values ? "objective values" : "energies", png_name(path));
        s += "set xlabel 't'\n";
        const std::size_t first = 3 + 2 * static_cast<std::size_t>(d) + (values ? 0 : q);
        s += "plot ";
        for (std::size_t i = 0; i < q; ++i) {
            if (i) s += ", \\\n     ";
            const std::string name = (values ? "f" : "E") + std::to_string(i + 1);
            s += "'" + csv + "' using 2:" + std::to_string(first + i) + " with lines title '" + name + "'";
        }
        s += "\n";
        break;
    }
    case PlotKind::pareto_cloud:
        throw InvalidInput("pareto_cloud plots are produced from sweep results");
    }
    write_text(path, s);
}

namespace {

std::string summary_header(const SweepResult& r, bool with_distance) {
    std::string h = "run,seed";
    for (Eigen::Index k = 0; k < r.dim; ++k) h += ",u" + std::to_string(k);
    for (std::size_t i = 1; i <= r.count; ++i) h += ",f" + std::to_string(i);
    h += ",snorm,stop_reason";
    if (with_distance) h += ",pareto_distance";
    return h + "\n";
}

std::string summary_row(const SweepRunResult& run, bool with_distance) {
    std::string row = std::to_string(run.run) + "," + std::to_string(run.seed);
    for (Eigen::Index k = 0; k < run.u_terminal.size(); ++k) row += "," + fmt17(run.u_terminal(k));
    for (double f : run.values.values) row += "," + fmt17(f);
    row += "," + fmt17(run.snorm) + "," + std::string(to_string(run.stop_reason));
    if (with_distance) row += "," + (run.pareto_distance ? fmt17(*run.pareto_distance) : std::string());
    return row + "\n";
}

bool has_distance(const SweepResult& r) {
    return std::any_of(r.runs.begin(), r.runs.end(), [](const auto& x) { return x.pareto_distance.has_value(); });
}

} // namespace

void write_sweep_summary(const SweepResult& result, const fs::path& dir) {
    if (result.runs.empty()) throw InvalidInput("write_sweep_summary: no runs");
    const bool dist = has_distance(result);
    const std::string header = summary_header(result, dist);
    std::string all = header;
    std::vector<ParetoEntry> cloud;
    for (const auto& run : result.runs) {
        all += summary_row(run, dist);
        cloud.push_back({Vector::Constant(1, static_cast<double>(run.run)), run.values});
    }
    write_text(dir / "summary.csv", all);

    std::string nd = header;
    for (const auto& e : pareto_filter(cloud)) nd += summary_row(result.runs[static_cast<std::size_t>(e.point(0))], dist);
    write_text(dir / "nondominated.csv", nd);
}

void write_sweep_index(const SweepResult& result, const fs::path& dir) {
    json j;
    j["problem"] = result.problem;
    j["dim"] = result.dim;
    j["objectives"] = result.count;
    j["base_seed"] = result.base_seed;
    j["summary"] = "summary.csv";
    j["nondominated"] = "nondominated.csv";
    json runs = json::array();
    for (const auto& r : result.runs) {
        runs.push_back({{"run", r.run},
                        {"seed", r.seed},
                        {"csv", r.csv},
                        {"steps", r.steps},
                        {"stop_reason", std::string(to_string(r.stop_reason))}});
    }
    j["runs"] = runs;
    write_text(dir / "index.json", j.dump(2) + "\n");
}

void emit_sweep_plot_script(const SweepResult& result, const fs::path& dir, const std::string& name) {
    if (result.dim != 2) throw InvalidInput("pareto_cloud plots need d = 2, got d = " + std::to_string(result.dim));
    std::string s = gnuplot_preamble("terminal cloud (x initial, (+) limit)", png_name(dir / name));
    s += "set xlabel 'u0'\nset ylabel 'u1'\nset size ratio -1\n";
    s += "plot \\\n";
    for (const auto& r : result.runs) {
        if (r.csv.empty()) continue;
        s += "     '" + r.csv + "' using 3:4 with lines lc rgb 'gray' notitle, \\\n";
        s += "     '" + r.csv + "' every ::0::0 using 3:4 with points pt 2 ps 1.5 lc rgb 'black' notitle, \\\n";
    }
    s += "     'summary.csv' using 3:4 with points pt 6 ps 1.5 lc rgb 'red' title 'terminal', \\\n";
    s += "     'summary.csv' using 3:4 with points pt 1 ps 1.5 lc rgb 'red' notitle, \\\n";
    s += "     'nondominated.csv' using 3:4 with points pt 7 ps 0.8 lc rgb 'blue' title 'non-dominated'\n";
    write_text(dir / name, s);
}

} // namespace imog
