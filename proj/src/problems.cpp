#include "imog/problems.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "imog/error.hpp"

namespace imog {
namespace {

void require_2d(const Vector& u, std::string_view name) {
    if (u.size() != 2) throw InvalidInput(std::string(name) + ": expects a point in R^2");
}

Vector vec2(double x, double y) {
    Vector v(2);
    v << x, y;
    return v;
}

ScalarObjective part(std::string label, std::function<double(const Vector&)> value,
                     std::function<Vector(const Vector&)> gradient, double lipschitz) {
    ScalarObjective o;
    o.label = std::move(label);
    o.value = std::move(value);
    o.gradient = std::move(gradient);
    o.lipschitz = lipschitz;
    return o;
}

std::vector<ScalarObjective> biquadratic_parts() {
    ScalarObjective f1 = part("f1",
                       [](const Vector& u) { return 0.5 * (u(0) + 1) * (u(0) + 1) + 0.5 * u(1) * u(1); },
                       [](const Vector& u) { return vec2(u(0) + 1, u(1)); },
                       1.0);
    ScalarObjective f2 = part("f2",
                       [](const Vector& u) { return 0.5 * (u(0) - 1) * (u(0) - 1) + 0.5 * u(1) * u(1); },
                       [](const Vector& u) { return vec2(u(0) - 1, u(1)); },
                       1.0);
    return {f1, f2};
}

std::vector<ScalarObjective> quadratic_linear_parts() {
    ScalarObjective f1 = part("f1", [](const Vector& u) { return 0.5 * (u(0) * u(0) + u(1) * u(1)); },
                       [](const Vector& u) { return vec2(u(0), u(1)); }, 1.0);
    ScalarObjective f2 = part("f2", [](const Vector& u) { return u(0); },
                       [](const Vector&) { return vec2(1.0, 0.0); }, 0.0);
    return {f1, f2};
}

std::vector<ScalarObjective> hbf_quadratic_parts() {
    ScalarObjective f = part("f", [](const Vector& u) { return 0.5 * u(0) * u(0) + u(1) * u(1); },
                      [](const Vector& u) { return vec2(u(0), 2.0 * u(1)); }, 2.0);
    return {f};
}

VectorObjective default_convex_quadratic() {
    const double r = std::sqrt(3.0) / 2.0;
    const std::vector<Vector> centers{vec2(1.0, 0.0), vec2(-0.5, r), vec2(-0.5, -r)};
    const std::vector<Eigen::MatrixXd> qs(3, Eigen::MatrixXd::Identity(2, 2));
    return convex_quadratic(centers, qs);
}

std::vector<ScalarObjective> parts_of(std::string_view name) {
    if (name == "biquadratic") return biquadratic_parts();
    if (name == "quadratic_linear") return quadratic_linear_parts();
    if (name == "hbf_quadratic") return hbf_quadratic_parts();
    if (name == "convex_quadratic") {
        const auto obj = default_convex_quadratic();
        std::vector<ScalarObjective> parts;
        for (std::size_t i = 0; i < obj.count(); ++i) parts.push_back(obj.component(i));
        return parts;
    }
    throw NotFound("unknown builtin problem '" + std::string(name) + "'");
}

} // namespace

const std::vector<BuiltinInfo>& builtin_problems() {
    static const std::vector<BuiltinInfo> infos{
        {"biquadratic", 2, 2, {1.0, 1.0}, {"f1", "f2"}, "[−1,1]×{0}",
         "f1 = ½(x+1)² + ½y², f2 = ½(x−1)² + ½y²"},
        {"quadratic_linear", 2, 2, {1.0, 0.0}, {"f1", "f2"}, "(−∞,0]×{0}", "f1 = ½(x² + y²), f2 = x"},
        {"hbf_quadratic", 2, 1, {2.0}, {"f"}, "{(0,0)}", "f = ½x² + y² (heavy ball reference)"},
        {"convex_quadratic", 2, 3, {1.0, 1.0, 1.0}, {"f1", "f2", "f3"},
         "triangle co{(1,0), (−½,√3/2), (−½,−√3/2)}", "fi = ½|u − ai|², ai on an equilateral triangle"},
    };
    return infos;
}

VectorObjective builtin_problem(std::string_view name) {
    if (name == "convex_quadratic") return default_convex_quadratic();
    return VectorObjective(2, parts_of(name));
}

VectorObjective convex_quadratic(const std::vector<Vector>& centers, const std::vector<Eigen::MatrixXd>& matrices) {
    if (centers.empty() || centers.size() != matrices.size()) {
        throw InvalidInput("convex_quadratic: need matching nonempty lists of centers and matrices");
    }
    const Eigen::Index d = centers.front().size();
    std::vector<ScalarObjective> parts;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const Vector a = centers[i];
        const Eigen::MatrixXd q = matrices[i];
        if (a.size() != d || q.rows() != d || q.cols() != d) {
            throw InvalidInput("convex_quadratic: objective " + std::to_string(i) + " has mismatched dimensions");
        }
        if (!a.allFinite() || !q.allFinite()) throw InvalidInput("convex_quadratic: non-finite data");
        const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
        if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
            throw InvalidInput("convex_quadratic: matrix " + std::to_string(i) + " is not symmetric");
        }
        const Vector eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q, Eigen::EigenvaluesOnly).eigenvalues();
        if (eig.minCoeff() < -1e-12 * scale) {
            throw InvalidInput("convex_quadratic: matrix " + std::to_string(i) + " is not positive semidefinite");
        }
        ScalarObjective f;
        f.label = "f" + std::to_string(i + 1);
        f.value = [a, q](const Vector& u) {
            const Vector r = u - a;
            return 0.5 * r.dot(q * r);
        };
        f.gradient = [a, q](const Vector& u) -> Vector { return q * (u - a); };
        f.lipschitz = std::max(0.0, eig.cwiseAbs().maxCoeff());
        parts.push_back(std::move(f));
    }
    return VectorObjective(d, std::move(parts));
}

ScalarObjective builtin_component(std::string_view reference) {
    const auto slash = reference.find('/');
    if (slash == std::string_view::npos) {
        throw NotFound("builtin objective reference '" + std::string(reference) + "' must look like problem/label");
    }
    const auto problem = reference.substr(0, slash);
    const auto label = reference.substr(slash + 1);
    for (auto& part : parts_of(problem)) {
        if (part.label == label) return part;
    }
    throw NotFound("problem '" + std::string(problem) + "' has no objective '" + std::string(label) + "'");
}

Vector analytic_steepest(std::string_view name, const Vector& u) {
    if (name == "biquadratic") {
        require_2d(u, name);
        const double x = u(0), y = u(1);
        if (x > 1.0) return vec2(-(x - 1.0), -y);
        if (x < -1.0) return vec2(-(x + 1.0), -y);
        return vec2(0.0, -y);
    }
    if (name == "quadratic_linear") {
        require_2d(u, name);
        const double x = u(0), y = u(1);
        if (x >= 1.0) return vec2(-1.0, 0.0);
        if ((x - 0.5) * (x - 0.5) + y * y <= 0.25) return vec2(-x, -y);
        const double denom = (x - 1.0) * (x - 1.0) + y * y;
        return vec2(-y * y / denom, -y * (1.0 - x) / denom);
    }
    throw NotFound("no closed-form steepest field for '" + std::string(name) + "'");
}

} // namespace imog
