#include "imog/energy.hpp"

namespace imog {

EnergyVector energy(const VectorObjective& obj, const DynParams& p, const DynState& state) {
    const double kinetic = p.mass * state.v.squaredNorm();
    const double ratio = p.mass / p.damping;
    EnergyVector e;
    e.values.reserve(obj.count());
    for (std::size_t i = 0; i < obj.count(); ++i) {
        e.values.push_back(obj.value(i, state.u) + ratio * obj.gradient(i, state.u).dot(state.v) + kinetic);
    }
    return e;
}

} // namespace imog
