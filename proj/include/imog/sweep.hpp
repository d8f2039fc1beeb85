#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "imog/trajio.hpp"

namespace imog {

/// splitmix64 of base + run; the seed of sweep member `run`.
std::uint64_t derive_seed(std::uint64_t base, std::size_t run);

/// Uniform point in the box [lo, hi] drawn from mt19937_64(seed). The mapping
/// from raw bits to doubles is fixed here, so samples agree across standard libraries.
Vector sample_box(std::uint64_t seed, const std::vector<double>& lo, const std::vector<double>& hi);

/// Initial states of every sweep member, in run order.
std::vector<DynState> sweep_initial_states(const VectorObjective& obj, const SweepConfig& cfg);

/// Integrate every member, up to cfg.parallelism at a time. When `out_dir` is
/// set each worker writes out_dir/runs/run_NNNN.csv. Results are in run order
/// and independent of the thread count.
SweepResult run_sweep(const LoadedProblem& problem, const SweepConfig& cfg,
                      const std::optional<std::filesystem::path>& out_dir = std::nullopt);

} // namespace imog
