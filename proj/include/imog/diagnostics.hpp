#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "imog/energy.hpp"
#include "imog/state.hpp"

namespace imog {

/// Damping condition γ² > m L_i for one objective.
struct HpEntry {
    double lipschitz = 0.0;
    /// True when `lipschitz` was estimated along a trajectory instead of supplied.
    bool estimated = false;
    double margin = 0.0;
    bool satisfied = false;
};

struct HpReport {
    std::vector<HpEntry> entries;

    bool satisfied() const;
};

/// max_n |∇f_i(u_{n+1}) - ∇f_i(u_n)| / |u_{n+1} - u_n| per objective, over consecutive
/// distinct samples. Zero when the trajectory never moves.
std::vector<double> estimate_lipschitz(const VectorObjective& obj, const Trajectory& trajectory);

/// Uses supplied bounds where present and trajectory estimates for the rest.
/// Throws MissingLipschitz when a bound is absent and no trajectory is given.
HpReport hp_report(const VectorObjective& obj, const DynParams& p, const Trajectory* trajectory = nullptr);

/// Same, from explicit bounds.
HpReport hp_report(const std::vector<double>& lipschitz, const DynParams& p);

/// E_i(t0) + (f_i(u0) - E_i(t0)) exp(-(γ/m)(t - t0)), an upper bound on f_i(u(t)) under (HP).
double upper_bound_envelope(double energy_t0, double value_u0, const DynParams& p, double t);

/// Euclidean distance to the analytic Pareto set of biquadratic ([-1,1]×{0})
/// or quadratic_linear ((-∞,0]×{0}). Throws NotFound otherwise.
double distance_to_pareto(std::string_view name, const Vector& u);

using ParetoOracle = std::function<double(const Vector&)>;

/// distance_to_pareto bound to `name`, or empty when no analytic set is known.
std::optional<ParetoOracle> pareto_oracle(std::string_view name);

/// Sign changes along `axis` of the positions u_n (or of the increments
/// u_n - u_{n-1} when `increments` is set). Exact zeros do not reset the sign.
std::size_t sign_changes(const Trajectory& trajectory, Eigen::Index axis, bool increments = false);

struct TrajectoryReport {
    std::size_t steps = 0;
    StopReason stop_reason = StopReason::max_steps;
    /// max over n, i of (E_i(t_{n+1}) - E_i(t_n))⁺
    double energy_monotone_violation = 0.0;
    /// Σ_n (E_i(t_{n+1}) - E_i(t_n))⁺ per objective.
    std::vector<double> energy_increase_total;
    /// max over n, i of (f_i(u_n) - envelope_i(t_n))⁺
    double envelope_violation = 0.0;
    double terminal_snorm = 0.0;
    double terminal_vnorm = 0.0;
    /// |m a + γ v - s(u)| at the last step, a = (v_{n+1} - v_n)/h. Zero for mog runs.
    double terminal_residual = 0.0;
    /// Mean of f_i over the final 1% of samples.
    std::vector<double> value_limits;
    std::optional<double> pareto_distance;
    /// Sign changes of the last coordinate of u_n - u_{n-1}.
    std::size_t oscillation_count = 0;
    /// (HP) status; dissipation and envelope figures carry no guarantee when false.
    bool hp_satisfied = false;
    HpReport hp;
};

TrajectoryReport analyze(const Trajectory& trajectory, const VectorObjective& obj,
                         const ParetoOracle& pareto_oracle = {});

} // namespace imog
