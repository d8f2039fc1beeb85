#include "imog/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "imog/error.hpp"
#include "imog/objectives.hpp"

namespace imog {

bool HpReport::satisfied() const {
    return std::all_of(entries.begin(), entries.end(), [](const HpEntry& e) { return e.satisfied; });
}

std::vector<double> estimate_lipschitz(const VectorObjective& obj, const Trajectory& trajectory) {
    std::vector<double> est(obj.count(), 0.0);
    if (trajectory.states.empty()) return est;
    std::vector<Vector> prev;
    for (std::size_t i = 0; i < obj.count(); ++i) prev.push_back(obj.gradient(i, trajectory.states[0].u));
    for (std::size_t n = 1; n < trajectory.states.size(); ++n) {
        const Vector& u0 = trajectory.states[n - 1].u;
        const Vector& u1 = trajectory.states[n].u;
        const double dist = (u1 - u0).norm();
        for (std::size_t i = 0; i < obj.count(); ++i) {
            Vector g = obj.gradient(i, u1);
            if (dist > 0.0) est[i] = std::max(est[i], (g - prev[i]).norm() / dist);
            prev[i] = std::move(g);
        }
    }
    return est;
}

namespace {

HpEntry make_entry(double lipschitz, bool estimated, const DynParams& p) {
    HpEntry e;
    e.lipschitz = lipschitz;
    e.estimated = estimated;
    e.margin = p.damping * p.damping - p.mass * lipschitz;
    e.satisfied = e.margin > 0.0;
    return e;
}

} // namespace

HpReport hp_report(const std::vector<double>& lipschitz, const DynParams& p) {
    HpReport r;
    for (double l : lipschitz) {
        if (!(l >= 0.0)) throw InvalidInput("hp_report: Lipschitz bounds must be >= 0");
        r.entries.push_back(make_entry(l, false, p));
    }
    return r;
}

HpReport hp_report(const VectorObjective& obj, const DynParams& p, const Trajectory* trajectory) {
    std::optional<std::vector<double>> estimates;
    HpReport r;
    for (std::size_t i = 0; i < obj.count(); ++i) {
        if (const auto l = obj.lipschitz(i)) {
            r.entries.push_back(make_entry(*l, false, p));
            continue;
        }
        if (trajectory == nullptr) {
            throw MissingLipschitz("no Lipschitz bound for objective '" + obj.label(i) +
                                   "'; supply \"lipschitz\" in the problem file");
        }
        if (!estimates) estimates = estimate_lipschitz(obj, *trajectory);
        r.entries.push_back(make_entry((*estimates)[i], true, p));
    }
    return r;
}

double upper_bound_envelope(double energy_t0, double value_u0, const DynParams& p, double t) {
    if (t < p.t0) throw InvalidInput("upper_bound_envelope: t must be >= t0");
    return energy_t0 + (value_u0 - energy_t0) * std::exp(-(p.damping / p.mass) * (t - p.t0));
}

double distance_to_pareto(std::string_view name, const Vector& u) {
    if (u.size() != 2) throw InvalidInput("distance_to_pareto: expects a point in R^2");
    if (name == "biquadratic") return std::hypot(u(0) - std::clamp(u(0), -1.0, 1.0), u(1));
    if (name == "quadratic_linear") return std::hypot(std::max(u(0), 0.0), u(1));
    throw NotFound("no analytic Pareto set for '" + std::string(name) + "'");
}

std::optional<ParetoOracle> pareto_oracle(std::string_view name) {
    if (name != "biquadratic" && name != "quadratic_linear") return std::nullopt;
    return ParetoOracle([n = std::string(name)](const Vector& u) { return distance_to_pareto(n, u); });
}

std::size_t sign_changes(const Trajectory& trajectory, Eigen::Index axis, bool increments) {
    const auto& st = trajectory.states;
    std::size_t changes = 0;
    int last = 0;
    for (std::size_t n = increments ? 1 : 0; n < st.size(); ++n) {
        if (axis < 0 || axis >= st[n].u.size()) throw InvalidInput("sign_changes: axis out of range");
        const double x = increments ? st[n].u(axis) - st[n - 1].u(axis) : st[n].u(axis);
        const int sign = (x > 0.0) - (x < 0.0);
        if (sign == 0) continue;
        if (last != 0 && sign != last) ++changes;
        last = sign;
    }
    return changes;
}

TrajectoryReport analyze(const Trajectory& trajectory, const VectorObjective& obj, const ParetoOracle& oracle) {
    const auto& st = trajectory.states;
    const auto& dg = trajectory.diagnostics;
    if (st.empty() || dg.size() != st.size()) throw InvalidInput("analyze: empty or inconsistent trajectory");
    const std::size_t q = obj.count();
    const DynParams& p = trajectory.params;

    TrajectoryReport r;
    r.steps = st.size() - 1;
    r.stop_reason = trajectory.stop_reason;
    r.energy_increase_total.assign(q, 0.0);

    const auto& e0 = dg.front().energies;
    const auto& f0 = dg.front().values;
    for (std::size_t n = 0; n < st.size(); ++n) {
        for (std::size_t i = 0; i < q; ++i) {
            if (n > 0) {
                const double inc = std::max(0.0, dg[n].energies[i] - dg[n - 1].energies[i]);
                r.energy_monotone_violation = std::max(r.energy_monotone_violation, inc);
                r.energy_increase_total[i] += inc;
            }
            const double bound = upper_bound_envelope(e0[i], f0[i], p, st[n].t);
            r.envelope_violation = std::max(r.envelope_violation, dg[n].values[i] - bound);
        }
    }

    r.terminal_snorm = dg.back().snorm;
    r.terminal_vnorm = st.back().v.norm();
    if (trajectory.scheme == Scheme::imog && st.size() >= 2) {
        const auto& a = st[st.size() - 2];
        const auto& b = st.back();
        const Vector accel = (b.v - a.v) / p.step;
        const Vector s = steepest_descent(obj, a.u).direction;
        r.terminal_residual = (p.mass * accel + p.damping * a.v - s).norm();
    }

    const std::size_t window = std::max<std::size_t>(1, st.size() / 100);
    r.value_limits.assign(q, 0.0);
    for (std::size_t n = st.size() - window; n < st.size(); ++n) {
        for (std::size_t i = 0; i < q; ++i) r.value_limits[i] += dg[n].values[i];
    }
    for (double& v : r.value_limits) v /= static_cast<double>(window);

    if (oracle) r.pareto_distance = oracle(st.back().u);
    r.oscillation_count = sign_changes(trajectory, obj.dim() - 1, true);
    r.hp = hp_report(obj, p, &trajectory);
    r.hp_satisfied = r.hp.satisfied();
    return r;
}

} // namespace imog
