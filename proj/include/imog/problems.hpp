#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imog/objectives.hpp"

namespace imog {

struct BuiltinInfo {
    std::string name;
    Eigen::Index dim;
    std::size_t count;
    std::vector<double> lipschitz;
    std::vector<std::string> labels;
    std::string pareto_set;
    std::string description;
};

/// Builtin problems in a fixed order.
const std::vector<BuiltinInfo>& builtin_problems();

/// biquadratic:      f1 = ½(x+1)² + ½y², f2 = ½(x-1)² + ½y²; Pareto set [-1,1]×{0}
/// quadratic_linear: f1 = ½(x²+y²), f2 = x;                 Pareto set (-∞,0]×{0}
/// hbf_quadratic:    f = ½x² + y² (single objective)
/// convex_quadratic: three unit quadratics centered on an equilateral triangle
/// Throws NotFound for any other name.
VectorObjective builtin_problem(std::string_view name);

/// f_i(u) = ½ (u - a_i)ᵀ Q_i (u - a_i) with symmetric positive semidefinite Q_i.
/// Lipschitz bounds are set to the spectral norms of the Q_i.
VectorObjective convex_quadratic(const std::vector<Vector>& centers, const std::vector<Eigen::MatrixXd>& matrices);

/// One component of a builtin problem, addressed as "problem/label" (e.g. "biquadratic/f1").
ScalarObjective builtin_component(std::string_view reference);

/// Closed-form steepest descent field of biquadratic and quadratic_linear.
Vector analytic_steepest(std::string_view name, const Vector& u);

} // namespace imog
