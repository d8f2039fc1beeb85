#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace imog {

using Vector = Eigen::VectorXd;

/// Convex weights θ ∈ Δ_q.
struct SimplexWeights {
    std::vector<double> theta;

    std::size_t size() const noexcept { return theta.size(); }
    double operator[](std::size_t i) const { return theta[i]; }
};

/// Finite set of vectors of common dimension whose convex hull is projected.
class GradientBundle {
public:
    explicit GradientBundle(std::vector<Vector> vectors);

    std::size_t count() const noexcept { return vectors_.size(); }
    Eigen::Index dim() const noexcept { return vectors_.front().size(); }
    const Vector& operator[](std::size_t i) const { return vectors_[i]; }
    std::span<const Vector> vectors() const noexcept { return vectors_; }

private:
    std::vector<Vector> vectors_;
};

struct MinNormResult {
    Vector point;
    SimplexWeights weights;
    double norm = 0.0;
};

inline constexpr double kDefaultMinNormTol = 1e-10;

/// Minimum-norm element of co{g_1..g_q} (projection of the origin onto the hull).
///
/// q = 1 returns the vector itself and q = 2 uses the closed form. Larger
/// bundles run Wolfe's minimum-norm-point iteration until the duality gap
/// max_i <p, p - g_i> drops below tol * max(1, max_i |g_i|^2). Vertex ties are
/// broken by lowest index, so identical inputs give identical outputs.
///
/// Throws InvalidInput on non-finite coordinates.
MinNormResult min_norm_point(const GradientBundle& bundle, double tol = kDefaultMinNormTol);

/// Closed form for two vectors: weight on g2 is clamp(<g1-g2, g1> / |g1-g2|^2, 0, 1).
MinNormResult min_norm_point_pair(const Vector& g1, const Vector& g2);

/// Exhaustive search over the lattice {θ ∈ Δ_q : θ_i = k_i / resolution}.
/// Test oracle only. Throws UnsupportedSize for q > 4.
MinNormResult brute_force_min_norm(const GradientBundle& bundle, int resolution);

/// max_i <p, p - g_i>; zero (up to rounding) exactly at the projection.
double duality_gap(const GradientBundle& bundle, const Vector& point);

} // namespace imog
