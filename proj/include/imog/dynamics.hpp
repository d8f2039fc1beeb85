#pragma once

#include <cstddef>

#include "imog/state.hpp"

namespace imog {

/// Threshold on |u| beyond which a run is declared divergent.
inline constexpr double kDivergenceBound = 1e12;

/// One explicit step of m ü + γ u̇ = s(u):
///   v' = (m v + h s(u)) / (m + h γ),  u' = u + h v',  t' = t + h.
/// Equivalent to u_{n+1} = u_n + m/(m+hγ) (u_n - u_{n-1}) + h²/(m+hγ) s(u_n)
/// with v_n = (u_n - u_{n-1}) / h. Throws DivergenceError on a non-finite or
/// exploding result.
DynState imog_step(const VectorObjective& obj, const DynParams& p, const DynState& state);

/// Explicit Euler for u̇ = s(u).
Vector mog_step(const VectorObjective& obj, double h, const Vector& u);

/// Heavy ball with friction, the q = 1 case; s = -∇f. Throws InvalidInput for q > 1.
DynState hbf_step(const VectorObjective& obj, const DynParams& p, const DynState& state);

/// λ s(u0) for λ ∈ [0, 1/γ]. The result is verified to satisfy
/// <∇f_i(u0), v0> <= -γ |v0|² for every i (within 1e-9).
Vector default_initial_velocity(const VectorObjective& obj, const Vector& u0, double lambda, double damping);

/// Step until |s(u_n)| <= crit_tol and |v_n| <= vel_tol, max_steps, or divergence.
/// Divergence ends the run with the last finite state; it does not throw. A
/// non-finite field at the initial state is an InvalidInput.
/// The run starts at p.t0 regardless of initial.t. For the mog scheme v_n records s(u_n).
Trajectory integrate(const VectorObjective& obj, const DynParams& p, const DynState& initial,
                     const StopRule& stop, Scheme scheme = Scheme::imog);

/// |u^(h)(T) - u^(h/2)(T)| with h = p.step. `n_steps` counts fine steps of
/// size h/2, so it must be even; the coarse run takes n_steps/2 steps of size h
/// and both end at T = t0 + n_steps h / 2.
double step_halving_error(const VectorObjective& obj, const DynParams& p, const DynState& initial,
                          std::size_t n_steps);

} // namespace imog
