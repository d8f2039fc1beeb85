#include "imog/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>

#include "imog/error.hpp"

namespace imog {
namespace {

class Parser {
public:
    Parser(std::string_view src, std::optional<Eigen::Index> dim) : src_(src), dim_(dim) {}

    ExprNode parse() {
        skip_space();
        if (pos_ == src_.size()) fail("empty expression");
        ExprNode root = parse_sum();
        skip_space();
        if (pos_ != src_.size()) fail(std::string("unexpected '") + src_[pos_] + "'");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(pos_, msg); }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static ExprNode binary(NodeKind kind, ExprNode lhs, ExprNode rhs) {
        ExprNode n;
        n.kind = kind;
        n.args.push_back(std::move(lhs));
        n.args.push_back(std::move(rhs));
        return n;
    }

    ExprNode parse_sum() {
        ExprNode lhs = parse_product();
        while (true) {
            if (accept('+')) {
                lhs = binary(NodeKind::add, std::move(lhs), parse_product());
            } else if (accept('-')) {
                lhs = binary(NodeKind::subtract, std::move(lhs), parse_product());
            } else {
                return lhs;
            }
        }
    }

    ExprNode parse_product() {
        ExprNode lhs = parse_unary();
        while (true) {
            if (accept('*')) {
                lhs = binary(NodeKind::multiply, std::move(lhs), parse_unary());
            } else if (accept('/')) {
                lhs = binary(NodeKind::divide, std::move(lhs), parse_unary());
            } else {
                return lhs;
            }
        }
    }

    ExprNode parse_unary() {
        if (accept('-')) {
            ExprNode n;
            n.kind = NodeKind::negate;
            n.args.push_back(parse_unary());
            return n;
        }
        return parse_power();
    }

    ExprNode parse_power() {
        ExprNode base = parse_primary();
        if (accept('^')) return binary(NodeKind::power, std::move(base), parse_unary());
        return base;
    }

    ExprNode parse_primary() {
        skip_space();
        if (pos_ == src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        if (c == '(') {
            ++pos_;
            ExprNode inner = parse_sum();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        fail(std::string("unexpected '") + c + "'");
    }

    ExprNode parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mantissa = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) {
            pos_ = start;
            fail("malformed number");
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t exp_start = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) {
                pos_ = exp_start;
                fail("malformed exponent");
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        ExprNode n;
        n.kind = NodeKind::number;
        n.number = std::strtod(text.c_str(), nullptr);
        if (!std::isfinite(n.number)) {
            pos_ = start;
            fail("numeric literal out of range");
        }
        return n;
    }

    ExprNode parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = src_.substr(start, pos_ - start);

        static constexpr std::pair<std::string_view, Function> functions[] = {
            {"exp", Function::exp},   {"log", Function::log},   {"sin", Function::sin},
            {"cos", Function::cos},   {"sqrt", Function::sqrt}, {"abs", Function::abs},
        };
        for (const auto& [fname, fn] : functions) {
            if (name != fname) continue;
            if (!accept('(')) fail("expected '(' after " + std::string(name));
            ExprNode n;
            n.kind = NodeKind::call;
            n.function = fn;
            n.args.push_back(parse_sum());
            if (!accept(')')) fail("expected ')'");
            return n;
        }

        const bool is_var = name.size() >= 2 && name[0] == 'x' &&
                            std::all_of(name.begin() + 1, name.end(),
                                        [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); });
        if (is_var && name.size() <= 10) {
            const int index = std::stoi(std::string(name.substr(1)));
            if (!dim_ || index < *dim_) {
                ExprNode n;
                n.kind = NodeKind::variable;
                n.variable = index;
                return n;
            }
        }
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
    }

    std::string_view src_;
    std::optional<Eigen::Index> dim_;
    std::size_t pos_ = 0;
};

int max_var(const ExprNode& n) {
    int m = n.kind == NodeKind::variable ? n.variable : -1;
    for (const auto& a : n.args) m = std::max(m, max_var(a));
    return m;
}

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
    return v;
}

double eval(const ExprNode& n, const Vector& x) {
    switch (n.kind) {
    case NodeKind::number: return n.number;
    case NodeKind::variable:
        if (n.variable >= x.size()) {
            throw InvalidInput("variable x" + std::to_string(n.variable) + " out of range");
        }
        return x(n.variable);
    case NodeKind::negate: return -eval(n.args[0], x);
    case NodeKind::add: return checked(eval(n.args[0], x) + eval(n.args[1], x), "addition");
    case NodeKind::subtract: return checked(eval(n.args[0], x) - eval(n.args[1], x), "subtraction");
    case NodeKind::multiply: return checked(eval(n.args[0], x) * eval(n.args[1], x), "multiplication");
    case NodeKind::divide: {
        const double num = eval(n.args[0], x);
        const double den = eval(n.args[1], x);
        if (den == 0.0) throw DomainError("division by zero");
        return checked(num / den, "division");
    }
    case NodeKind::power: return checked(std::pow(eval(n.args[0], x), eval(n.args[1], x)), "power");
    case NodeKind::call: {
        const double a = eval(n.args[0], x);
        switch (n.function) {
        case Function::exp: return checked(std::exp(a), "exp");
        case Function::log:
            if (!(a > 0.0)) throw DomainError("log of nonpositive value");
            return std::log(a);
        case Function::sin: return std::sin(a);
        case Function::cos: return std::cos(a);
        case Function::sqrt:
            if (a < 0.0) throw DomainError("sqrt of negative value");
            return std::sqrt(a);
        case Function::abs: return std::abs(a);
        }
    }
    }
    throw DomainError("corrupt expression tree");
}

const char* function_name(Function f) {
    switch (f) {
    case Function::exp: return "exp";
    case Function::log: return "log";
    case Function::sin: return "sin";
    case Function::cos: return "cos";
    case Function::sqrt: return "sqrt";
    case Function::abs: return "abs";
    }
    return "?";
}

void print(const ExprNode& n, std::string& out) {
    auto bin = [&](const char* op) {
        out += '(';
        print(n.args[0], out);
        out += op;
        print(n.args[1], out);
        out += ')';
    };
    switch (n.kind) {
    case NodeKind::number: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", n.number);
        out += buf;
        return;
    }
    case NodeKind::variable: out += "x" + std::to_string(n.variable); return;
    case NodeKind::negate:
        out += "(-";
        print(n.args[0], out);
        out += ')';
        return;
    case NodeKind::add: bin(" + "); return;
    case NodeKind::subtract: bin(" - "); return;
    case NodeKind::multiply: bin(" * "); return;
    case NodeKind::divide: bin(" / "); return;
    case NodeKind::power: bin("^"); return;
    case NodeKind::call:
        out += function_name(n.function);
        out += '(';
        print(n.args[0], out);
        out += ')';
        return;
    }
}

} // namespace

ExpressionObjective::ExpressionObjective(std::string source, ExprNode ast)
    : source_(std::move(source)), ast_(std::move(ast)), max_variable_(max_var(ast_)) {}

double ExpressionObjective::evaluate(const Vector& x) const { return eval(ast_, x); }

std::string ExpressionObjective::to_string() const {
    std::string out;
    print(ast_, out);
    return out;
}

ExpressionObjective parse_expression(std::string_view source, std::optional<Eigen::Index> dim) {
    Parser p(source, dim);
    ExprNode ast = p.parse();
    return ExpressionObjective(std::string(source), std::move(ast));
}

Vector finite_diff_gradient(const ExpressionObjective& expr, const Vector& u, std::optional<double> step) {
    const double h = step.value_or(1e-6 * std::max(1.0, u.norm()));
    if (!(h > 0.0)) throw InvalidInput("finite_diff_gradient: step must be > 0");
    Vector g(u.size());
    Vector x = u;
    for (Eigen::Index k = 0; k < u.size(); ++k) {
        x(k) = u(k) + h;
        const double fp = expr.evaluate(x);
        x(k) = u(k) - h;
        const double fm = expr.evaluate(x);
        x(k) = u(k);
        g(k) = (fp - fm) / (2.0 * h);
    }
    return g;
}

namespace {

Vector eval_gradient(const std::vector<ExpressionObjective>& grad, const Vector& u) {
    Vector g(static_cast<Eigen::Index>(grad.size()));
    for (std::size_t k = 0; k < grad.size(); ++k) g(static_cast<Eigen::Index>(k)) = grad[k].evaluate(u);
    return g;
}

} // namespace

GradientCheck check_gradient(const ExpressionObjective& value,
                             const std::vector<ExpressionObjective>& gradient, Eigen::Index dim) {
    if (static_cast<Eigen::Index>(gradient.size()) != dim) {
        throw InvalidInput("gradient has " + std::to_string(gradient.size()) + " components, expected " +
                           std::to_string(dim));
    }
    constexpr std::size_t kPoints = 10;
    constexpr double kRelTol = 1e-4;
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    GradientCheck check;
    for (std::size_t attempt = 0; attempt < 100 * kPoints && check.points < kPoints; ++attempt) {
        Vector u(dim);
        for (Eigen::Index k = 0; k < dim; ++k) {
            u(k) = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
        }
        Vector fd, an;
        try {
            fd = finite_diff_gradient(value, u);
            an = eval_gradient(gradient, u);
        } catch (const DomainError&) {
            continue;
        }
        const double rel = (an - fd).lpNorm<Eigen::Infinity>() / std::max(1.0, fd.lpNorm<Eigen::Infinity>());
        check.max_rel_error = std::max(check.max_rel_error, rel);
        ++check.points;
    }
    check.passed = check.points == kPoints && check.max_rel_error <= kRelTol;
    return check;
}

ScalarObjective make_expression_objective(std::string label, ExpressionObjective value,
                                          std::optional<std::vector<ExpressionObjective>> gradient,
                                          std::optional<double> lipschitz, Eigen::Index dim) {
    if (value.max_variable() >= dim) {
        throw InvalidInput(label + ": expression references x" + std::to_string(value.max_variable()) +
                           " but dim is " + std::to_string(dim));
    }
    ScalarObjective obj;
    obj.label = std::move(label);
    obj.lipschitz = lipschitz;
    auto shared_value = std::make_shared<const ExpressionObjective>(std::move(value));
    obj.value = [shared_value](const Vector& u) { return shared_value->evaluate(u); };
    if (gradient) {
        obj.gradient_check = check_gradient(*shared_value, *gradient, dim);
        auto shared_grad = std::make_shared<const std::vector<ExpressionObjective>>(std::move(*gradient));
        obj.gradient = [shared_grad](const Vector& u) { return eval_gradient(*shared_grad, u); };
    } else {
        obj.finite_difference_gradient = true;
        obj.gradient = [shared_value](const Vector& u) { return finite_diff_gradient(*shared_value, u); };
    }
    return obj;
}

} // namespace imog
