#pragma once

#include "imog/state.hpp"

namespace imog {

/// E_i = f_i(u) + (m/γ) <∇f_i(u), v> + m |v|², the per-objective Lyapunov energy.
EnergyVector energy(const VectorObjective& obj, const DynParams& p, const DynState& state);

} // namespace imog
