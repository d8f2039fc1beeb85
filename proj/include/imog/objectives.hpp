#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "imog/minnorm.hpp"

namespace imog {

/// F(u) = (f_1(u), ..., f_q(u)).
struct ObjectiveVector {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

/// Result of cross-checking a user-supplied gradient against central differences.
struct GradientCheck {
    bool passed = true;
    double max_rel_error = 0.0;
    std::size_t points = 0;
};

/// One scalar component f_i with its gradient oracle.
struct ScalarObjective {
    std::string label;
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
    /// Global bound on Lip(grad f_i), when known.
    std::optional<double> lipschitz;
    bool finite_difference_gradient = false;
    std::optional<GradientCheck> gradient_check;
};

/// A family of q smooth objectives over R^d. Immutable once built; evaluation is reentrant.
class VectorObjective {
public:
    VectorObjective(Eigen::Index dim, std::vector<ScalarObjective> objectives);

    Eigen::Index dim() const noexcept { return dim_; }
    std::size_t count() const noexcept { return objectives_.size(); }
    const ScalarObjective& component(std::size_t i) const { return objectives_.at(i); }
    const std::string& label(std::size_t i) const { return objectives_.at(i).label; }
    std::optional<double> lipschitz(std::size_t i) const { return objectives_.at(i).lipschitz; }

    double value(std::size_t i, const Vector& u) const;
    Vector gradient(std::size_t i, const Vector& u) const;
    ObjectiveVector values(const Vector& u) const;
    GradientBundle gradients(const Vector& u) const;

private:
    void check_point(const Vector& u) const;

    Eigen::Index dim_;
    std::vector<ScalarObjective> objectives_;
};

/// a ⪯ b: a_i <= b_i for every i.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

/// a ≺ b: a_i < b_i for every i.
bool strictly_dominates_weak(const ObjectiveVector& a, const ObjectiveVector& b);

struct ParetoEntry {
    Vector point;
    ObjectiveVector values;
};

enum class ParetoMode {
    /// Drop entries some other entry dominates with a different objective vector.
    efficient,
    /// Drop only entries some other entry strictly improves in every objective.
    weak,
};

/// Non-dominated subset of a cloud, input order preserved. O(n^2).
std::vector<ParetoEntry> pareto_filter(std::span<const ParetoEntry> cloud,
                                       ParetoMode mode = ParetoMode::efficient);

struct SteepestResult {
    /// s(u) = -Σ θ_i ∇f_i(u)
    Vector direction;
    SimplexWeights weights;
    double norm = 0.0;
};

/// Multi-objective steepest descent direction: minus the min-norm element of co{∇f_i(u)}.
/// For q = 1 this is exactly -∇f(u).
SteepestResult steepest_descent(const VectorObjective& obj, const Vector& u,
                                double tol = kDefaultMinNormTol);

/// |s(u)| <= eps
bool is_pareto_critical(const VectorObjective& obj, const Vector& u, double eps);

/// min over sampled unit d of max_i <∇f_i(u), d>, minus the same max at d = s/|s|.
/// Nonnegative when no sample beats the normalized steepest direction.
/// Throws PreconditionError at a critical point.
double steepest_characterization_gap(const VectorObjective& obj, const Vector& u,
                                     std::span<const Vector> directions);

} // namespace imog
