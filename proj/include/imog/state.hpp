#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imog/objectives.hpp"

namespace imog {

/// Mass, damping, step size and start time of a discretized run.
struct DynParams {
    double mass = 1.0;
    double damping = 1.0;
    double step = 0.01;
    double t0 = 0.0;

    /// Throws InvalidInput unless mass, damping and step are positive and finite.
    void validate() const;
};

struct DynState {
    double t = 0.0;
    Vector u;
    Vector v;
};

struct StopRule {
    std::size_t max_steps = 1'000'000;
    double crit_tol = 1e-6;
    double vel_tol = 1e-6;

    void validate() const;
};

enum class Scheme { imog, mog };

enum class StopReason { criticality, max_steps, divergence };

std::string_view to_string(Scheme s);
std::string_view to_string(StopReason r);
std::optional<Scheme> parse_scheme(std::string_view s);

/// Per-objective energies E_i.
struct EnergyVector {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/// Quantities recorded alongside each state.
struct StepDiagnostics {
    ObjectiveVector values;
    EnergyVector energies;
    double snorm = 0.0;
    SimplexWeights weights;
};

/// States at t_n = t0 + n h with matching diagnostics.
struct Trajectory {
    DynParams params;
    Scheme scheme = Scheme::imog;
    std::vector<DynState> states;
    std::vector<StepDiagnostics> diagnostics;
    StopReason stop_reason = StopReason::max_steps;
    /// Set when stop_reason is divergence.
    std::string divergence_message;

    std::size_t size() const noexcept { return states.size(); }
    const DynState& back() const { return states.back(); }
};

} // namespace imog
