#include "imog/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "imog/error.hpp"

namespace imog {

VectorObjective::VectorObjective(Eigen::Index dim, std::vector<ScalarObjective> objectives)
    : dim_(dim), objectives_(std::move(objectives)) {
    if (dim_ < 1) throw InvalidInput("VectorObjective: dimension must be >= 1");
    if (objectives_.empty()) throw InvalidInput("VectorObjective: at least one objective required");
    for (std::size_t i = 0; i < objectives_.size(); ++i) {
        const auto& o = objectives_[i];
        if (!o.value || !o.gradient) {
            throw InvalidInput("VectorObjective: objective " + std::to_string(i) + " lacks an evaluator");
        }
        if (o.lipschitz && !(*o.lipschitz >= 0.0 && std::isfinite(*o.lipschitz))) {
            throw InvalidInput("VectorObjective: lipschitz bound of objective " + std::to_string(i) +
                               " must be finite and >= 0");
        }
    }
}

void VectorObjective::check_point(const Vector& u) const {
    if (u.size() != dim_) {
        throw InvalidInput("point has dimension " + std::to_string(u.size()) + ", expected " +
                           std::to_string(dim_));
    }
    if (!u.allFinite()) throw InvalidInput("point has non-finite coordinates");
}

double VectorObjective::value(std::size_t i, const Vector& u) const {
    check_point(u);
    return objectives_.at(i).value(u);
}

Vector VectorObjective::gradient(std::size_t i, const Vector& u) const {
    check_point(u);
    Vector g = objectives_.at(i).gradient(u);
    if (g.size() != dim_) {
        throw InvalidInput("gradient of " + objectives_[i].label + " has wrong dimension");
    }
    return g;
}

ObjectiveVector VectorObjective::values(const Vector& u) const {
    check_point(u);
    ObjectiveVector out;
    out.values.reserve(objectives_.size());
    for (const auto& o : objectives_) out.values.push_back(o.value(u));
    return out;
}

GradientBundle VectorObjective::gradients(const Vector& u) const {
    std::vector<Vector> gs;
    gs.reserve(objectives_.size());
    for (std::size_t i = 0; i < objectives_.size(); ++i) gs.push_back(gradient(i, u));
    return GradientBundle(std::move(gs));
}

namespace {

void require_same_length(const ObjectiveVector& a, const ObjectiveVector& b) {
    if (a.size() != b.size()) {
        throw InvalidInput("objective vectors of lengths " + std::to_string(a.size()) + " and " +
                           std::to_string(b.size()) + " are not comparable");
    }
}

} // namespace

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    require_same_length(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] <= b[i])) return false;
    }
    return true;
}

bool strictly_dominates_weak(const ObjectiveVector& a, const ObjectiveVector& b) {
    require_same_length(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] < b[i])) return false;
    }
    return true;
}

std::vector<ParetoEntry> pareto_filter(std::span<const ParetoEntry> cloud, ParetoMode mode) {
    std::vector<ParetoEntry> kept;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < cloud.size() && !dominated; ++j) {
            if (i == j) continue;
            const auto& a = cloud[j].values;
            const auto& b = cloud[i].values;
            dominated = mode == ParetoMode::efficient ? dominates(a, b) && a != b
                                                      : strictly_dominates_weak(a, b);
        }
        if (!dominated) kept.push_back(cloud[i]);
    }
    return kept;
}

SteepestResult steepest_descent(const VectorObjective& obj, const Vector& u, double tol) {
    const auto mn = min_norm_point(obj.gradients(u), tol);
    SteepestResult r;
    r.direction = -mn.point;
    r.weights = mn.weights;
    r.norm = mn.norm;
    return r;
}

bool is_pareto_critical(const VectorObjective& obj, const Vector& u, double eps) {
    if (!(eps > 0.0)) throw InvalidInput("is_pareto_critical: eps must be > 0");
    return steepest_descent(obj, u).norm <= eps;
}

double steepest_characterization_gap(const VectorObjective& obj, const Vector& u,
                                     std::span<const Vector> directions) {
    const auto sd = steepest_descent(obj, u);
    if (sd.norm == 0.0) {
        throw PreconditionError("steepest_characterization_gap: u is Pareto critical (s(u) = 0)");
    }
    if (directions.empty()) throw InvalidInput("steepest_characterization_gap: no directions");
    const auto grads = obj.gradients(u);
    auto worst_slope = [&](const Vector& d) {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& g : grads.vectors()) m = std::max(m, g.dot(d));
        return m;
    };
    double best_sample = std::numeric_limits<double>::infinity();
    for (const auto& d : directions) {
        if (d.size() != obj.dim() || std::abs(d.norm() - 1.0) > 1e-9) {
            throw InvalidInput("steepest_characterization_gap: directions must be unit vectors in R^d");
        }
        best_sample = std::min(best_sample, worst_slope(d));
    }
    return best_sample - worst_slope(sd.direction / sd.norm);
}

} // namespace imog
