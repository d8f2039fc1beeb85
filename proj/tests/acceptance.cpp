// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "imog/diagnostics.hpp"
#include "imog/dynamics.hpp"
#include "imog/energy.hpp"
#include "imog/minnorm.hpp"
#include "imog/problems.hpp"
#include "imog/sweep.hpp"
#include "imog/trajio.hpp"
#include "test_support.hpp"

using namespace imog;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

DynParams params(double m, double gamma, double h) {
    DynParams p;
    p.mass = m;
    p.damping = gamma;
    p.step = h;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Seeded starts in [-4, 4]^2.
std::vector<Vector> starts(std::uint64_t seed, int n) {
    test::Rng rng(seed);
    std::vector<Vector> out;
    for (int k = 0; k < n; ++k) out.push_back(rng.point(2, -4, 4));
    return out;
}

// Region formulas of the steepest descent field, written out independently.
Vector oracle_biquadratic(const Vector& u) {
    const double x = u(0), y = u(1);
    if (x >= 1) return test::vec({-(x - 1), -y});
    if (x <= -1) return test::vec({-(x + 1), -y});
    return test::vec({0, -y});
}

Vector oracle_quadratic_linear(const Vector& u) {
    const double x = u(0), y = u(1);
    if (x >= 1) return test::vec({-1, 0});
    if ((x - 0.5) * (x - 0.5) + y * y <= 0.25) return test::vec({-x, -y});
    const double den = (x - 1) * (x - 1) + y * y;
    return test::vec({-y * y / den, -y * (1 - x) / den});
}

Outcome criterion_min_norm() {
    const auto t0 = Clock::now();
    test::Rng rng(20240601);
    double worst_excess = -std::numeric_limits<double>::infinity();
    double worst_residual = 0.0;
    for (int b = 0; b < 200; ++b) {
        const int q = rng.integer(1, 4);
        const int d = rng.integer(1, 5);
        std::vector<Vector> gs;
        for (int i = 0; i < q; ++i) gs.push_back(rng.point(d, -2, 2));
        const GradientBundle bundle(gs);
        const auto r = min_norm_point(bundle);
        const auto bf = brute_force_min_norm(bundle, 200);
        worst_excess = std::max(worst_excess, r.point.norm() - bf.point.norm());
        // Variational inequality <p, g_i - p> >= 0 for every vertex.
        for (const auto& g : gs) worst_residual = std::max(worst_residual, -r.point.dot(g - r.point));
        Vector combo = Vector::Zero(d);
        double sum = 0.0;
        for (int i = 0; i < q; ++i) {
            combo += r.weights[i] * gs[i];
            sum += r.weights[i];
            if (r.weights[i] < 0) worst_residual = std::max(worst_residual, -r.weights[i]);
        }
        worst_residual = std::max({worst_residual, (combo - r.point).norm(), std::abs(sum - 1)});
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = worst_excess <= 1e-9 && worst_residual <= 1e-8 && secs < 5.0;
    o.detail = "max(|p| - |p_bf|) = " + fmt(worst_excess) + " (<= 1e-9), residual " + fmt(worst_residual) +
               " (<= 1e-8), " + fmt(secs) + " s (< 5)";
    return o;
}

Outcome criterion_steepest_oracle() {
    const auto t0 = Clock::now();
    test::Rng rng(77);
    double worst = 0.0;
    const auto ex1 = builtin_problem("biquadratic");
    const auto ex2 = builtin_problem("quadratic_linear");
    for (int k = 0; k < 1000; ++k) {
        const Vector u = rng.point(2, -4, 4);
        worst = std::max(worst, (steepest_descent(ex1, u).direction - oracle_biquadratic(u)).norm());
    }
    for (int k = 0; k < 1000; ++k) {
        const Vector u = rng.point(2, -4, 4);
        worst = std::max(worst, (steepest_descent(ex2, u).direction - oracle_quadratic_linear(u)).norm());
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-8 && secs < 2.0, "max deviation " + fmt(worst) + " (<= 1e-8), " + fmt(secs) + " s (< 2)"};
}

Outcome criterion_common_descent() {
    test::Rng rng(31337);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& info : builtin_problems()) {
        const auto obj = builtin_problem(info.name);
        for (int k = 0; k < 1000; ++k) {
            const Vector u = rng.point(info.dim, -4, 4);
            const Vector s = steepest_descent(obj, u).direction;
            for (std::size_t i = 0; i < obj.count(); ++i)
                worst = std::max(worst, obj.gradient(i, u).dot(s) + s.squaredNorm());
        }
    }
    return {worst <= 1e-7, "max <grad f_i, s> + |s|^2 = " + fmt(worst) + " (<= 1e-7) over " +
                               std::to_string(builtin_problems().size()) + " problems"};
}

Outcome criterion_convergence() {
    const auto t0 = Clock::now();
    StopRule stop;
    double worst_ex1 = 0.0, worst_snorm = 0.0, worst_ex2 = 0.0;
    bool all_stopped = true;
    {
        const auto obj = builtin_problem("biquadratic");
        const double gamma = 1.0;
        for (const auto& u0 : starts(401, 20)) {
            const Vector v0 = steepest_descent(obj, u0).direction / gamma;
            const auto traj = integrate(obj, params(1, gamma, 0.01), DynState{0.0, u0, v0}, stop);
            all_stopped = all_stopped && traj.stop_reason == StopReason::criticality;
            const Vector& u = traj.back().u;
            const double dist = std::hypot(u(0) - std::clamp(u(0), -1.0, 1.0), u(1));
            worst_ex1 = std::max(worst_ex1, dist);
            worst_snorm = std::max(worst_snorm, steepest_descent(obj, u).norm);
        }
    }
    {
        const auto obj = builtin_problem("quadratic_linear");
        for (const auto& u0 : starts(402, 20)) {
            const auto traj = integrate(obj, params(1, 1, 0.05), DynState{0.0, u0, Vector::Zero(2)}, stop);
            all_stopped = all_stopped && traj.stop_reason == StopReason::criticality;
            const Vector& u = traj.back().u;
            worst_ex2 = std::max(worst_ex2, std::hypot(std::max(u(0), 0.0), u(1)));
        }
    }
    const double secs = seconds_since(t0);
    return {all_stopped && worst_ex1 <= 1e-3 && worst_snorm <= 1e-6 && worst_ex2 <= 1e-3 && secs < 30.0,
            "biquadratic dist " + fmt(worst_ex1) + ", |s| " + fmt(worst_snorm) + "; quadratic_linear dist " +
                fmt(worst_ex2) + " (<= 1e-3, 1e-6, 1e-3), " + fmt(secs) + " s (< 30)"};
}

// Example 1 with gamma = 2, h = 0.01, v0 = s(u0)/gamma from seeded starts.
std::vector<Trajectory> dissipative_runs(const VectorObjective& obj) {
    std::vector<Trajectory> runs;
    const double gamma = 2.0;
    for (const auto& u0 : starts(501, 10)) {
        const Vector v0 = steepest_descent(obj, u0).direction / gamma;
        runs.push_back(integrate(obj, params(1, gamma, 0.01), DynState{0.0, u0, v0}, StopRule{}));
    }
    return runs;
}

Outcome criterion_dissipation(const VectorObjective& obj, const std::vector<Trajectory>& runs) {
    double worst = 0.0;
    for (const auto& traj : runs) {
        std::vector<double> total(obj.count(), 0.0);
        for (std::size_t n = 0; n + 1 < traj.size(); ++n) {
            const auto e0 = energy(obj, traj.params, traj.states[n]);
            const auto e1 = energy(obj, traj.params, traj.states[n + 1]);
            for (std::size_t i = 0; i < obj.count(); ++i) total[i] += std::max(0.0, e1[i] - e0[i]);
        }
        for (double t : total) worst = std::max(worst, t);
    }
    const double margin = hp_report(obj, runs.front().params).entries.front().margin;
    return {worst <= 1e-3, "HP margin " + fmt(margin) + ", max cumulative energy increase " + fmt(worst) + " (<= 1e-3)"};
}

Outcome criterion_envelope(const VectorObjective& obj, const std::vector<Trajectory>& runs) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& traj : runs) {
        const auto& p = traj.params;
        const auto e0 = energy(obj, p, traj.states.front());
        for (const auto& s : traj.states) {
            const double decay = std::exp(-(p.damping / p.mass) * (s.t - p.t0));
            for (std::size_t i = 0; i < obj.count(); ++i) {
                const double f0 = obj.value(i, traj.states.front().u);
                const double bound = e0[i] + (f0 - e0[i]) * decay;
                worst = std::max(worst, obj.value(i, s.u) - bound);
            }
        }
    }
    return {worst <= 1e-3, "max f_i(u_n) - envelope(t_n) = " + fmt(worst) + " (<= 1e-3)"};
}

Outcome criterion_value_improvement() {
    const double gamma = 2.0;
    double worst = -std::numeric_limits<double>::infinity();
    std::uint64_t seed = 701;
    for (const char* name : {"biquadratic", "quadratic_linear"}) {
        const auto obj = builtin_problem(name);
        for (double lambda : {0.0, 0.5 / gamma, 1.0 / gamma}) {
            for (const auto& u0 : starts(seed++, 10)) {
                const Vector v0 = lambda * steepest_descent(obj, u0).direction;
                const auto traj = integrate(obj, params(1, gamma, 0.01), DynState{0.0, u0, v0}, StopRule{});
                for (const auto& s : traj.states)
                    for (std::size_t i = 0; i < obj.count(); ++i)
                        worst = std::max(worst, obj.value(i, s.u) - obj.value(i, u0));
            }
        }
    }
    return {worst <= 1e-6, "max f_i(u_n) - f_i(u0) = " + fmt(worst) + " (<= 1e-6)"};
}

std::size_t y_sign_changes(const Trajectory& traj) {
    std::size_t changes = 0;
    int last = 0;
    for (const auto& s : traj.states) {
        const int sign = (s.u(1) > 0) - (s.u(1) < 0);
        if (sign == 0) continue;
        if (last != 0 && sign != last) ++changes;
        last = sign;
    }
    return changes;
}

Outcome criterion_oscillation() {
    const auto obj = builtin_problem("biquadratic");
    auto run = [&](double gamma) {
        return integrate(obj, params(1, gamma, 0.01), DynState{0.0, test::vec({3, 2}), test::vec({0, 0})}, StopRule{});
    };
    const auto low = y_sign_changes(run(0.1));
    const auto high = y_sign_changes(run(2.0));
    return {low > 5 && high <= 1, "y sign changes: gamma=0.1 -> " + std::to_string(low) + " (> 5), gamma=2 -> " +
                                      std::to_string(high) + " (<= 1)"};
}

Outcome criterion_step_halving() {
    bool pass = true;
    std::string detail;
    const double T = 2.0;
    const std::pair<const char*, Vector> cases[] = {{"hbf_quadratic", test::vec({1, 1})}, {"biquadratic", test::vec({3, 2})}};
    for (const auto& [name, u0] : cases) {
        const auto obj = builtin_problem(name);
        std::vector<double> errs;
        for (double h : {0.1, 0.05, 0.025}) {
            const auto fine_steps = static_cast<std::size_t>(std::lround(2.0 * T / h));
            errs.push_back(step_halving_error(obj, params(1, 1, h), DynState{0.0, u0, Vector::Zero(2)}, fine_steps));
        }
        detail += std::string(detail.empty() ? "" : "; ") + name + " ratios";
        for (std::size_t k = 0; k + 1 < errs.size(); ++k) {
            const double ratio = errs[k] / errs[k + 1];
            pass = pass && ratio >= 1.5 && ratio <= 3.0;
            detail += " " + fmt(ratio);
        }
    }
    return {pass, detail + " (in [1.5, 3.0])"};
}

Outcome criterion_determinism() {
    test::TempDir dir("acceptance");
    const auto problem = load_problem("biquadratic");
    SweepConfig cfg;
    cfg.run.problem = "biquadratic";
    cfg.run.seed = 99;
    cfg.n_runs = 8;
    cfg.velocity.lambda = 0.5;
    bool same = true;
    std::vector<std::string> first;
    for (std::size_t threads : {1, 4}) {
        cfg.parallelism = threads;
        const fs::path out = dir.path() / ("t" + std::to_string(threads));
        const auto result = run_sweep(problem, cfg, out);
        write_sweep_summary(result, out);
        std::vector<std::string> files{slurp(out / "summary.csv"), slurp(out / "nondominated.csv")};
        for (const auto& r : result.runs) files.push_back(slurp(out / r.csv));
        if (first.empty()) {
            first = files;
        } else {
            same = same && files == first;
        }
    }

    const auto obj = problem.objective;
    const auto traj = integrate(obj, params(1, 0.3, 0.03), DynState{0.0, test::vec({3, 2}), test::vec({0.1, -0.2})}, StopRule{});
    write_trajectory_csv(traj, dir.path() / "a.csv");
    const auto back = read_trajectory_csv(dir.path() / "a.csv");
    bool exact = back.size() == traj.size();
    for (std::size_t n = 0; exact && n < traj.size(); ++n) {
        exact = back.states[n].t == traj.states[n].t && back.states[n].u == traj.states[n].u &&
                back.states[n].v == traj.states[n].v && back.diagnostics[n].values == traj.diagnostics[n].values &&
                back.diagnostics[n].energies.values == traj.diagnostics[n].energies.values &&
                back.diagnostics[n].snorm == traj.diagnostics[n].snorm &&
                back.diagnostics[n].weights.theta == traj.diagnostics[n].weights.theta;
    }
    return {same && exact, std::string("sweep files ") + (same ? "byte-identical" : "DIFFER") + ", CSV round-trip of " +
                               std::to_string(traj.size()) + " states " + (exact ? "bit-exact" : "LOSSY")};
}

} // namespace

int main() {
    const auto ex1 = builtin_problem("biquadratic");
    std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"min-norm oracle equivalence", criterion_min_norm},
        {"steepest-field oracle", criterion_steepest_oracle},
        {"common descent", criterion_common_descent},
        {"convergence to the Pareto set", criterion_convergence},
        {"discrete dissipation", [&] { return criterion_dissipation(ex1, dissipative_runs(ex1)); }},
        {"value upper bound", [&] { return criterion_envelope(ex1, dissipative_runs(ex1)); }},
        {"value improvement", criterion_value_improvement},
        {"oscillatory regime", criterion_oscillation},
        {"scheme consistency", criterion_step_halving},
        {"determinism and I/O", criterion_determinism},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
