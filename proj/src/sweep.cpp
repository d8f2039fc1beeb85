#include "imog/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "imog/dynamics.hpp"
#include "imog/error.hpp"

namespace imog {

std::uint64_t derive_seed(std::uint64_t base, std::size_t run) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(run) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Vector sample_box(std::uint64_t seed, const std::vector<double>& lo, const std::vector<double>& hi) {
    if (lo.size() != hi.size() || lo.empty()) throw InvalidInput("sample_box: bad box");
    std::mt19937_64 rng(seed);
    Vector u(static_cast<Eigen::Index>(lo.size()));
    for (std::size_t k = 0; k < lo.size(); ++k) {
        const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        u(static_cast<Eigen::Index>(k)) = lo[k] + (hi[k] - lo[k]) * unit;
    }
    return u;
}

std::vector<DynState> sweep_initial_states(const VectorObjective& obj, const SweepConfig& cfg) {
    const auto d = static_cast<std::size_t>(obj.dim());
    const std::vector<double> lo = cfg.box_min.value_or(std::vector<double>(d, -4.0));
    const std::vector<double> hi = cfg.box_max.value_or(std::vector<double>(d, 4.0));
    if (lo.size() != d || hi.size() != d) {
        throw InvalidInput("sweep.box has " + std::to_string(lo.size()) + " coordinates, problem dimension is " +
                           std::to_string(d));
    }
    std::vector<DynState> starts;
    for (std::size_t r = 0; r < cfg.n_runs; ++r) {
        DynState s;
        s.t = cfg.run.params.t0;
        s.u = sample_box(derive_seed(cfg.run.seed, r), lo, hi);
        s.v = cfg.velocity.lambda
                  ? default_initial_velocity(obj, s.u, *cfg.velocity.lambda, cfg.run.params.damping)
                  : Vector::Zero(obj.dim());
        starts.push_back(std::move(s));
    }
    return starts;
}

SweepResult run_sweep(const LoadedProblem& problem, const SweepConfig& cfg,
                      const std::optional<std::filesystem::path>& out_dir) {
    const auto& obj = problem.objective;
    const auto starts = sweep_initial_states(obj, cfg);

    SweepResult result;
    result.problem = problem.name;
    result.dim = obj.dim();
    result.count = obj.count();
    result.base_seed = cfg.run.seed;
    result.runs.resize(cfg.n_runs);

    if (out_dir) std::filesystem::create_directories(*out_dir / "runs");

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t r = next++; r < cfg.n_runs; r = next++) {
            try {
                const auto traj = integrate(obj, cfg.run.params, starts[r], cfg.run.stop, cfg.run.scheme);
                SweepRunResult& out = result.runs[r];
                out.run = r;
                out.seed = derive_seed(cfg.run.seed, r);
                out.u_initial = starts[r].u;
                out.u_terminal = traj.back().u;
                out.values = traj.diagnostics.back().values;
                out.snorm = traj.diagnostics.back().snorm;
                out.stop_reason = traj.stop_reason;
                out.steps = traj.size() - 1;
                if (problem.oracle) out.pareto_distance = (*problem.oracle)(out.u_terminal);
                if (out_dir) {
                    char name[32];
                    std::snprintf(name, sizeof name, "runs/run_%04zu.csv", r);
                    out.csv = name;
                    write_trajectory_csv(traj, *out_dir / out.csv);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    const std::size_t threads = std::min(cfg.parallelism, cfg.n_runs);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return result;
}

} // namespace imog
