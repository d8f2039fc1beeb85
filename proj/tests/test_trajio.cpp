#include "doctest.h"

#include <fstream>
#include <sstream>

#include "imog/dynamics.hpp"
#include "imog/error.hpp"
#include "imog/problems.hpp"
#include "imog/sweep.hpp"
#include "imog/trajio.hpp"
#include "test_support.hpp"

using namespace imog;
using imog::test::vec;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

StepDiagnostics diag(std::vector<double> f, std::vector<double> e, double snorm, std::vector<double> theta) {
    StepDiagnostics d;
    d.values.values = std::move(f);
    d.energies.values = std::move(e);
    d.snorm = snorm;
    d.weights.theta = std::move(theta);
    return d;
}

Trajectory small_trajectory() {
    Trajectory t;
    t.params.step = 0.1;
    t.states.push_back(DynState{0.0, vec({3, 2}), vec({-1, 0})});
    t.diagnostics.push_back(diag({10, 4}, {7, 3}, 2, {0.5, 0.5}));
    t.states.push_back(DynState{0.1, vec({2.875, -0.5}), vec({0.25, 6.103515625e-05})});
    t.diagnostics.push_back(diag({-1.5, 1234567.875}, {1.0 / 3.0, -0.0}, 1, {1, 0}));
    return t;
}

Trajectory run_example(std::size_t max_steps) {
    const auto obj = builtin_problem("biquadratic");
    DynParams p;
    p.damping = 0.5;
    p.step = 0.05;
    StopRule stop;
    stop.max_steps = max_steps;
    return integrate(obj, p, DynState{0.0, vec({3, 2}), vec({0.3, -0.7})}, stop);
}

json minimal_config() {
    return json{{"problem", "biquadratic"}, {"initial", {{"u0", {3, 2}}}}};
}

std::vector<std::string> issues_of(const json& doc, bool sweep = false) {
    try {
        if (sweep) {
            parse_sweep_config(doc);
        } else {
            parse_run_config(doc);
        }
    } catch (const ConfigError& e) {
        return e.issues();
    }
    return {};
}

bool mentions(const std::vector<std::string>& issues, const std::string& needle) {
    for (const auto& s : issues)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

} // namespace

TEST_CASE("trajectory CSV matches the golden file") {
    test::TempDir dir("golden");
    write_trajectory_csv(small_trajectory(), dir.path() / "t.csv");
    CHECK(slurp(dir.path() / "t.csv") == slurp(fs::path(IMOG_GOLDEN_DIR) / "trajectory_small.csv"));
}

TEST_CASE("trajectory CSV header and shape") {
    const auto h = trajectory_csv_header(3, 2);
    CHECK(h.size() == 3 + 2 * 3 + 2 * 2 + 2);
    CHECK(h.front() == "step");
    CHECK(h.back() == "theta2");

    test::TempDir dir("shape");
    Trajectory one = small_trajectory();
    one.states.resize(1);
    one.diagnostics.resize(1);
    write_trajectory_csv(one, dir.path() / "one.csv");
    const auto text = slurp(dir.path() / "one.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.back() == '\n');

    const auto traj = run_example(30);
    write_trajectory_csv(traj, dir.path() / "run.csv");
    std::ifstream in(dir.path() / "run.csv");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        CHECK(static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1 == 3 + 2 * 2 + 2 * 2 + 2);
        ++rows;
    }
    CHECK(rows == traj.size() + 1);
    CHECK_THROWS_AS(write_trajectory_csv(traj, dir.path() / "missing" / "x.csv"), IoError);
}

TEST_CASE("trajectory CSV round-trips bit-exactly") {
    test::TempDir dir("roundtrip");
    for (const auto& traj : {small_trajectory(), run_example(200)}) {
        write_trajectory_csv(traj, dir.path() / "a.csv");
        const auto back = read_trajectory_csv(dir.path() / "a.csv");
        REQUIRE(back.size() == traj.size());
        for (std::size_t n = 0; n < traj.size(); ++n) {
            CHECK(back.states[n].t == traj.states[n].t);
            CHECK(back.states[n].u == traj.states[n].u);
            CHECK(back.states[n].v == traj.states[n].v);
            CHECK(back.diagnostics[n].values == traj.diagnostics[n].values);
            CHECK(back.diagnostics[n].energies.values == traj.diagnostics[n].energies.values);
            CHECK(back.diagnostics[n].snorm == traj.diagnostics[n].snorm);
            CHECK(back.diagnostics[n].weights.theta == traj.diagnostics[n].weights.theta);
        }
        write_trajectory_csv(back, dir.path() / "b.csv");
        CHECK(slurp(dir.path() / "a.csv") == slurp(dir.path() / "b.csv"));
    }
    CHECK_THROWS_AS(read_trajectory_csv(dir.path() / "nope.csv"), IoError);
}

TEST_CASE("run config: accepted forms") {
    const auto cfg = parse_run_config(minimal_config());
    CHECK(cfg.problem == "biquadratic");
    CHECK(cfg.u0 == std::vector<double>{3, 2});
    CHECK(cfg.params.damping == 1.0);
    CHECK(cfg.stop.max_steps == 1'000'000);
    CHECK(cfg.scheme == Scheme::imog);

    json full = minimal_config();
    full["params"] = {{"m", 2}, {"gamma", 3}, {"h", 0.02}, {"t0", 1}};
    full["initial"]["v0"] = {{"lambda", 0.25}};
    full["stop"] = {{"max_steps", 10}, {"crit_tol", 1e-8}, {"vel_tol", 0}};
    full["scheme"] = "mog";
    full["seed"] = 42;
    full["outputs"] = {{"csv", "a.csv"}, {"report", "r.json"}, {"plot", "p.gp"}, {"plot_kind", "values"}};
    const auto c = parse_run_config(full);
    CHECK(c.params.mass == 2);
    CHECK(c.params.t0 == 1);
    CHECK(c.initial_velocity.lambda == 0.25);
    CHECK(c.stop.vel_tol == 0.0);
    CHECK(c.scheme == Scheme::mog);
    CHECK(c.seed == 42);
    CHECK(c.outputs.plot == "p.gp");
    CHECK(c.outputs.plot_kind == PlotKind::values);
}

TEST_CASE("run config: violations are named and aggregated") {
    json neg = minimal_config();
    neg["params"] = {{"h", -0.1}};
    CHECK(mentions(issues_of(neg), "params.h"));

    json lam = minimal_config();
    lam["params"] = {{"gamma", 1}};
    lam["initial"]["v0"] = {{"lambda", 2}};
    const auto li = issues_of(lam);
    REQUIRE(li.size() == 1);
    CHECK(mentions(li, "initial.v0.lambda"));
    CHECK(mentions(li, "[0, 1]"));

    json many = minimal_config();
    many["params"] = {{"h", 0}, {"m", "heavy"}, {"beta", 1}};
    many["stop"] = {{"max_steps", 0}};
    many["scheme"] = "rk4";
    many["colour"] = "red";
    many["initial"]["v0"] = {1, 2, 3};
    const auto mi = issues_of(many);
    for (const char* path : {"params.h", "params.m", "params.beta", "stop.max_steps", "scheme", "colour", "initial.v0"})
        CHECK_MESSAGE(mentions(mi, path), path);
    CHECK(mi.size() >= 7);

    CHECK(mentions(issues_of(json{{"initial", {{"u0", {1}}}}}), "problem"));
    CHECK(mentions(issues_of(json{{"problem", "biquadratic"}}), "initial.u0"));
    CHECK(mentions(issues_of(json::array()), "config"));
}

TEST_CASE("sweep config") {
    json doc = minimal_config();
    doc["initial"].erase("u0");
    doc["sweep"] = {{"n_runs", 5}, {"box", {{"min", {-1, -2}}, {"max", {1, 2}}}}, {"velocity", {{"lambda", 0.5}}},
                    {"parallelism", 2}};
    const auto cfg = parse_sweep_config(doc);
    CHECK(cfg.n_runs == 5);
    CHECK(cfg.box_min == std::vector<double>{-1, -2});
    CHECK(cfg.velocity.lambda == 0.5);
    CHECK(cfg.parallelism == 2);

    json bad = doc;
    bad["sweep"] = {{"n_runs", 0}, {"box", {{"min", {2, 0}}, {"max", {1, 1}}}}, {"velocity", "fast"}};
    const auto issues = issues_of(bad, true);
    CHECK(mentions(issues, "sweep.n_runs"));
    CHECK(mentions(issues, "sweep.box.min[0]"));
    CHECK(mentions(issues, "sweep.velocity"));

    CHECK(mentions(issues_of(doc), "sweep"));
}

TEST_CASE("config files") {
    test::TempDir dir("cfgfile");
    {
        std::ofstream(dir.path() / "ok.json") << minimal_config().dump();
        std::ofstream(dir.path() / "broken.json") << "{\"problem\": \"biquadratic\",\n  \"initial\": }";
    }
    CHECK(read_run_config(dir.path() / "ok.json").problem == "biquadratic");
    try {
        read_run_config(dir.path() / "broken.json");
        FAIL("expected a parse error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(read_run_config(dir.path() / "absent.json"), IoError);
}

TEST_CASE("problem files") {
    const json doc = {{"dim", 2},
                      {"objectives",
                       {{{"name", "g"}, {"expr", "x0^2 + x1^2"}, {"grad", {"2*x0", "2*x1"}}, {"lipschitz", 2}},
                        {{"name", "lin"}, {"builtin", "quadratic_linear/f2"}}}}};
    const auto obj = parse_problem(doc);
    CHECK(obj.count() == 2);
    CHECK(obj.label(0) == "g");
    CHECK(obj.values(vec({1, 2})).values == std::vector<double>{5, 1});
    CHECK(obj.gradient(0, vec({1, 2})) == vec({2, 4}));
    CHECK(obj.lipschitz(0) == 2.0);
    CHECK(obj.lipschitz(1) == 0.0);

    json bad = {{"dim", 2},
                {"objectives",
                 {{{"name", "a"}, {"expr", "x0 +"}},
                  {{"name", "b"}, {"expr", "x0"}, {"builtin", "biquadratic/f1"}},
                  {{"name", "c"}, {"builtin", "nowhere/f1"}},
                  {{"name", "d"}, {"expr", "x0"}, {"grad", {"1"}}},
                  {{"name", "e"}, {"expr", "x5"}}}},
                {"extra", true}};
    try {
        parse_problem(bad);
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        const auto& is = e.issues();
        for (const char* path : {"objectives[0].expr", "objectives[1]", "objectives[2].builtin", "objectives[3].grad",
                                 "objectives[4].expr", "extra"})
            CHECK_MESSAGE(mentions(is, path), path);
    }

    test::TempDir dir("problem");
    std::ofstream(dir.path() / "mine.json") << doc.dump();
    const auto loaded = load_problem("mine.json", dir.path());
    CHECK_FALSE(loaded.builtin);
    CHECK(loaded.name == "mine");
    CHECK(load_problem("quadratic_linear").oracle.has_value());
    CHECK_THROWS_AS(load_problem("no_such_thing"), NotFound);
}

TEST_CASE("plot scripts") {
    test::TempDir dir("plot");
    const auto traj = run_example(20);
    emit_plot_script(traj, "run.csv", dir.path() / "t.gp", PlotKind::trajectory2d);
    const auto text = slurp(dir.path() / "t.gp");
    CHECK(text.find("'run.csv' using 3:4") != std::string::npos);
    CHECK(text.find("pt 2") != std::string::npos);
    CHECK(text.find("pt 6") != std::string::npos);

    emit_plot_script(traj, "run.csv", dir.path() / "v.gp", PlotKind::values);
    const auto values = slurp(dir.path() / "v.gp");
    CHECK(values.find("using 2:7") != std::string::npos);
    CHECK(values.find("using 2:8") != std::string::npos);
    emit_plot_script(traj, "run.csv", dir.path() / "e.gp", PlotKind::energies);
    const auto energies = slurp(dir.path() / "e.gp");
    CHECK(energies.find("using 2:9") != std::string::npos);
    CHECK(energies.find("using 2:10") != std::string::npos);

    Trajectory three;
    three.states.push_back(DynState{0.0, vec({1, 2, 3}), vec({0, 0, 0})});
    three.diagnostics.push_back(diag({1}, {1}, 0, {1}));
    CHECK_THROWS_AS(emit_plot_script(three, "x.csv", dir.path() / "x.gp", PlotKind::trajectory2d), InvalidInput);
    CHECK_THROWS_AS(emit_plot_script(traj, "x.csv", dir.path() / "x.gp", PlotKind::pareto_cloud), InvalidInput);
    CHECK(parse_plot_kind("energies") == PlotKind::energies);
    CHECK_FALSE(parse_plot_kind("surface").has_value());
}

TEST_CASE("sweep summary and non-dominated subset") {
    test::TempDir dir("summary");
    SweepResult r;
    r.problem = "biquadratic";
    r.dim = 2;
    r.count = 2;
    SweepRunResult a;
    a.run = 0;
    a.seed = 7;
    a.u_terminal = vec({0, 0});
    a.values.values = {0.5, 0.5};
    a.stop_reason = StopReason::criticality;
    a.pareto_distance = 0.0;
    r.runs.push_back(a);
    write_sweep_summary(r, dir.path());
    CHECK(slurp(dir.path() / "summary.csv") ==
          "run,seed,u0,u1,f1,f2,snorm,stop_reason,pareto_distance\n0,7,0,0,0.5,0.5,0,criticality,0\n");
    CHECK(slurp(dir.path() / "nondominated.csv") == slurp(dir.path() / "summary.csv"));

    SweepRunResult b = a;
    b.run = 1;
    b.seed = 8;
    b.u_terminal = vec({2, 0});
    b.values.values = {4.5, 0.5};
    b.pareto_distance = 1.0;
    r.runs.push_back(b);
    write_sweep_summary(r, dir.path());
    const auto summary = slurp(dir.path() / "summary.csv");
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 3);
    CHECK(slurp(dir.path() / "nondominated.csv") ==
          "run,seed,u0,u1,f1,f2,snorm,stop_reason,pareto_distance\n0,7,0,0,0.5,0.5,0,criticality,0\n");

    write_sweep_index(r, dir.path());
    const auto index = json::parse(slurp(dir.path() / "index.json"));
    CHECK(index["runs"].size() == 2);
    CHECK(index["summary"] == "summary.csv");

    r.runs.clear();
    CHECK_THROWS_AS(write_sweep_summary(r, dir.path()), InvalidInput);
}

TEST_CASE("seeded sampling") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 3) == derive_seed(1, 3));
    const std::vector<double> lo{-4, -4}, hi{4, 4};
    imog::test::Rng pick(9);
    for (int k = 0; k < 100; ++k) {
        const auto seed = static_cast<std::uint64_t>(pick.integer(0, 1 << 30));
        const Vector x = sample_box(seed, lo, hi);
        CHECK(x == sample_box(seed, lo, hi));
        CHECK(x.minCoeff() >= -4.0);
        CHECK(x.maxCoeff() <= 4.0);
    }
    CHECK(sample_box(5, {1, 2}, {1, 2}) == vec({1, 2}));
}

TEST_CASE("sweeps are reproducible and independent of parallelism") {
    const auto problem = load_problem("quadratic_linear");
    SweepConfig cfg;
    cfg.run.problem = "quadratic_linear";
    cfg.run.params.step = 0.05;
    cfg.run.seed = 1234;
    cfg.n_runs = 6;
    test::TempDir d1("sweep1"), d2("sweep2");
    cfg.parallelism = 1;
    const auto r1 = run_sweep(problem, cfg, d1.path());
    write_sweep_summary(r1, d1.path());
    cfg.parallelism = 4;
    const auto r2 = run_sweep(problem, cfg, d2.path());
    write_sweep_summary(r2, d2.path());
    CHECK(slurp(d1.path() / "summary.csv") == slurp(d2.path() / "summary.csv"));
    CHECK(slurp(d1.path() / "nondominated.csv") == slurp(d2.path() / "nondominated.csv"));
    for (std::size_t k = 0; k < r1.runs.size(); ++k) {
        CHECK(r1.runs[k].u_initial == r2.runs[k].u_initial);
        CHECK(slurp(d1.path() / r1.runs[k].csv) == slurp(d2.path() / r2.runs[k].csv));
        CHECK(r1.runs[k].seed == derive_seed(1234, k));
    }
}
