#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imog/minnorm.hpp"
#include "imog/objectives.hpp"

namespace imog {

enum class NodeKind { number, variable, negate, add, subtract, multiply, divide, power, call };

enum class Function { exp, log, sin, cos, sqrt, abs };

/// Expression tree node. `args` holds operands: one for negate/call, two for binary operators.
struct ExprNode {
    NodeKind kind = NodeKind::number;
    double number = 0.0;
    int variable = 0;
    Function function = Function::exp;
    std::vector<ExprNode> args;

    friend bool operator==(const ExprNode&, const ExprNode&) = default;
};

/// A parsed scalar expression over x0..x{d-1}.
///
/// Grammar, loosest binding first: `+ -`, then `* /`, then unary minus, then
/// right-associative `^`. So `-x0^2` is `-(x0^2)` and `2*-x0` is `2*(-x0)`.
/// Functions: exp log sin cos sqrt abs.
class ExpressionObjective {
public:
    ExpressionObjective(std::string source, ExprNode ast);

    const std::string& source() const noexcept { return source_; }
    const ExprNode& ast() const noexcept { return ast_; }

    /// Largest variable index referenced, or -1 for a constant expression.
    int max_variable() const noexcept { return max_variable_; }

    /// Throws DomainError for log of nonpositive, sqrt of negative, division
    /// by zero, or any other non-finite intermediate.
    double evaluate(const Vector& x) const;

    /// Fully parenthesized text that parses back to the same tree.
    std::string to_string() const;

private:
    std::string source_;
    ExprNode ast_;
    int max_variable_ = -1;
};

/// Throws SyntaxError carrying the byte offset. When `dim` is given, variables
/// beyond x{dim-1} are rejected as unknown identifiers.
ExpressionObjective parse_expression(std::string_view source, std::optional<Eigen::Index> dim = {});

/// Central differences; default step is 1e-6 * max(1, |u|).
Vector finite_diff_gradient(const ExpressionObjective& expr, const Vector& u,
                            std::optional<double> step = {});

/// Compare a gradient against central differences of `value` at 10 seeded
/// points in [-1, 1]^d; relative tolerance 1e-4.
GradientCheck check_gradient(const ExpressionObjective& value,
                             const std::vector<ExpressionObjective>& gradient, Eigen::Index dim);

/// Wrap expressions as one objective component. Without `gradient` the
/// component uses finite differences and is flagged as such.
ScalarObjective make_expression_objective(std::string label, ExpressionObjective value,
                                          std::optional<std::vector<ExpressionObjective>> gradient,
                                          std::optional<double> lipschitz, Eigen::Index dim);

} // namespace imog
