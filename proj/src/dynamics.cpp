#include "imog/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "imog/energy.hpp"
#include "imog/error.hpp"

namespace imog {

void DynParams::validate() const {
    auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!positive(mass)) throw InvalidInput("mass must be positive and finite");
    if (!positive(damping)) throw InvalidInput("damping must be positive and finite");
    if (!positive(step)) throw InvalidInput("step must be positive and finite");
    if (!std::isfinite(t0)) throw InvalidInput("t0 must be finite");
}

void StopRule::validate() const {
    if (max_steps < 1) throw InvalidInput("max_steps must be >= 1");
    if (!(crit_tol > 0.0)) throw InvalidInput("crit_tol must be > 0");
    if (!(vel_tol >= 0.0)) throw InvalidInput("vel_tol must be >= 0");
}

std::string_view to_string(Scheme s) { return s == Scheme::imog ? "imog" : "mog"; }

std::string_view to_string(StopReason r) {
    switch (r) {
    case StopReason::criticality: return "criticality";
    case StopReason::max_steps: return "max_steps";
    case StopReason::divergence: return "divergence";
    }
    return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view s) {
    if (s == "imog") return Scheme::imog;
    if (s == "mog") return Scheme::mog;
    return std::nullopt;
}

namespace {

void check_state(const VectorObjective& obj, const DynState& state) {
    if (state.u.size() != obj.dim() || state.v.size() != obj.dim()) {
        throw InvalidInput("state dimension does not match the objective dimension " + std::to_string(obj.dim()));
    }
    if (!state.u.allFinite() || !state.v.allFinite() || !std::isfinite(state.t)) {
        throw InvalidInput("state has non-finite coordinates");
    }
}

void check_divergence(const Vector& u, const Vector& v, double t_from) {
    if (!u.allFinite() || !v.allFinite()) {
        std::ostringstream msg;
        msg << "non-finite state after the step from t = " << t_from;
        throw DivergenceError(t_from, msg.str());
    }
    if (u.norm() > kDivergenceBound) {
        std::ostringstream msg;
        msg << "|u| exceeded " << kDivergenceBound << " after the step from t = " << t_from;
        throw DivergenceError(t_from, msg.str());
    }
}

// s(u) at a finite state; a gradient that overflows counts as divergence.
SteepestResult field(const VectorObjective& obj, const Vector& u, double t) {
    try {
        return steepest_descent(obj, u);
    } catch (const InvalidInput& e) {
        std::ostringstream msg;
        msg << "non-finite gradient at t = " << t << ": " << e.what();
        throw DivergenceError(t, msg.str());
    }
}

DynState advance_inertial(const DynParams& p, const DynState& state, const Vector& s) {
    DynState next;
    next.v = (p.mass * state.v + p.step * s) / (p.mass + p.step * p.damping);
    next.u = state.u + p.step * next.v;
    next.t = state.t + p.step;
    check_divergence(next.u, next.v, state.t);
    return next;
}

Vector advance_first_order(double h, const Vector& u, const Vector& s, double t_from) {
    Vector next = u + h * s;
    check_divergence(next, s, t_from);
    return next;
}

} // namespace

DynState imog_step(const VectorObjective& obj, const DynParams& p, const DynState& state) {
    p.validate();
    check_state(obj, state);
    return advance_inertial(p, state, field(obj, state.u, state.t).direction);
}

Vector mog_step(const VectorObjective& obj, double h, const Vector& u) {
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("mog_step: h must be positive and finite");
    if (!u.allFinite() || u.size() != obj.dim()) throw InvalidInput("mog_step: u must be finite with the objective dimension");
    return advance_first_order(h, u, field(obj, u, 0.0).direction, 0.0);
}

DynState hbf_step(const VectorObjective& obj, const DynParams& p, const DynState& state) {
    if (obj.count() != 1) {
        throw InvalidInput("hbf_step: heavy ball needs a single objective, got " + std::to_string(obj.count()));
    }
    p.validate();
    check_state(obj, state);
    return advance_inertial(p, state, -obj.gradient(0, state.u));
}

Vector default_initial_velocity(const VectorObjective& obj, const Vector& u0, double lambda, double damping) {
    if (!(damping > 0.0) || !std::isfinite(damping)) throw InvalidInput("damping must be positive and finite");
    const double upper = 1.0 / damping;
    if (!(lambda >= 0.0 && lambda <= upper)) {
        std::ostringstream msg;
        msg << "lambda = " << lambda << " outside the admissible interval [0, " << upper << "] = [0, 1/gamma]";
        throw InvalidInput(msg.str());
    }
    const Vector v0 = lambda * steepest_descent(obj, u0).direction;
    const double kinetic = damping * v0.squaredNorm();
    for (std::size_t i = 0; i < obj.count(); ++i) {
        const double slope = obj.gradient(i, u0).dot(v0);
        if (slope + kinetic > 1e-9) {
            throw InvalidInput("initial velocity violates <grad f_" + std::to_string(i + 1) +
                               ", v0> <= -gamma |v0|^2");
        }
    }
    return v0;
}

Trajectory integrate(const VectorObjective& obj, const DynParams& p, const DynState& initial,
                     const StopRule& stop, Scheme scheme) {
    p.validate();
    stop.validate();
    check_state(obj, initial);

    Trajectory traj;
    traj.params = p;
    traj.scheme = scheme;
    DynState state = initial;
    state.t = p.t0;
    for (std::size_t n = 0;; ++n) {
        SteepestResult sd;
        try {
            sd = field(obj, state.u, state.t);
        } catch (const DivergenceError& e) {
            if (n == 0) throw InvalidInput(std::string("initial state: ") + e.what());
            traj.stop_reason = StopReason::divergence;
            traj.divergence_message = e.what();
            break;
        }
        if (scheme == Scheme::mog) state.v = sd.direction;

        StepDiagnostics diag;
        diag.values = obj.values(state.u);
        diag.energies = energy(obj, p, state);
        diag.snorm = sd.norm;
        diag.weights = sd.weights;
        traj.states.push_back(state);
        traj.diagnostics.push_back(std::move(diag));

        if (sd.norm <= stop.crit_tol && state.v.norm() <= stop.vel_tol) {
            traj.stop_reason = StopReason::criticality;
            break;
        }
        if (n == stop.max_steps) {
            traj.stop_reason = StopReason::max_steps;
            break;
        }
        try {
            if (scheme == Scheme::imog) {
                state = advance_inertial(p, state, sd.direction);
            } else {
                state.u = advance_first_order(p.step, state.u, sd.direction, state.t);
                state.t += p.step;
            }
        } catch (const DivergenceError& e) {
            traj.stop_reason = StopReason::divergence;
            traj.divergence_message = e.what();
            break;
        }
        // Keep t_n = t0 + n h exactly rather than accumulating rounding.
        state.t = p.t0 + static_cast<double>(n + 1) * p.step;
    }
    return traj;
}

double step_halving_error(const VectorObjective& obj, const DynParams& p, const DynState& initial,
                          std::size_t n_steps) {
    if (n_steps == 0 || n_steps % 2 != 0) throw InvalidInput("step_halving_error: n_steps must be even and positive");
    p.validate();
    check_state(obj, initial);
    DynParams fine = p;
    fine.step = p.step / 2.0;
    DynState coarse_state = initial;
    DynState fine_state = initial;
    for (std::size_t n = 0; n < n_steps / 2; ++n) coarse_state = imog_step(obj, p, coarse_state);
    for (std::size_t n = 0; n < n_steps; ++n) fine_state = imog_step(obj, fine, fine_state);
    return (coarse_state.u - fine_state.u).norm();
}

} // namespace imog
