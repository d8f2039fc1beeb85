#include "imog/minnorm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "imog/error.hpp"

namespace imog {
namespace {

void require_finite(const Vector& v, std::size_t index) {
    if (!v.allFinite()) {
        throw InvalidInput("min_norm_point: vector " + std::to_string(index) +
                           " has non-finite coordinates");
    }
}

MinNormResult make_result(Vector point, std::vector<double> theta) {
    MinNormResult r;
    r.norm = point.norm();
    r.point = std::move(point);
    r.weights.theta = std::move(theta);
    return r;
}

// Affine minimizer of |sum_k a_k g_{S_k}| subject to sum_k a_k = 1.
std::vector<double> affine_minimizer(const GradientBundle& bundle, const std::vector<std::size_t>& corral) {
    const std::size_t n = corral.size();
    if (n == 1) return {1.0};
    const Vector& base = bundle[corral[0]];
    Eigen::MatrixXd diffs(base.size(), static_cast<Eigen::Index>(n - 1));
    for (std::size_t k = 1; k < n; ++k) {
        diffs.col(static_cast<Eigen::Index>(k - 1)) = bundle[corral[k]] - base;
    }
    const Vector beta = diffs.completeOrthogonalDecomposition().solve(-base);
    std::vector<double> alpha(n);
    alpha[0] = 1.0 - beta.sum();
    for (std::size_t k = 1; k < n; ++k) alpha[k] = beta(static_cast<Eigen::Index>(k - 1));
    return alpha;
}

Vector combine(const GradientBundle& bundle, const std::vector<std::size_t>& corral,
               const std::vector<double>& lambda) {
    Vector x = Vector::Zero(bundle.dim());
    for (std::size_t k = 0; k < corral.size(); ++k) x += lambda[k] * bundle[corral[k]];
    return x;
}

// Weight below which a corral member is pruned.
constexpr double kPruneTol = 1e-15;

MinNormResult wolfe(const GradientBundle& bundle, double tol) {
    const std::size_t q = bundle.count();
    double scale = 1.0;
    for (const auto& g : bundle.vectors()) scale = std::max(scale, g.squaredNorm());
    const double gap_tol = tol * scale;

    std::size_t start = 0;
    for (std::size_t i = 1; i < q; ++i) {
        if (bundle[i].squaredNorm() < bundle[start].squaredNorm()) start = i;
    }
    std::vector<std::size_t> corral{start};
    std::vector<double> lambda{1.0};
    Vector x = bundle[start];

    const std::size_t max_major = 50 * q + 100;
    for (std::size_t major = 0; major < max_major; ++major) {
        std::size_t entering = 0;
        double best = x.dot(bundle[0]);
        for (std::size_t i = 1; i < q; ++i) {
            const double v = x.dot(bundle[i]);
            if (v < best) {
                best = v;
                entering = i;
            }
        }
        if (x.squaredNorm() - best <= gap_tol) break;
        if (std::find(corral.begin(), corral.end(), entering) != corral.end()) break;
        corral.push_back(entering);
        lambda.push_back(0.0);

        // Minor cycles: shrink the corral until the affine minimizer is interior.
        while (true) {
            const auto alpha = affine_minimizer(bundle, corral);
            bool interior = true;
            for (double a : alpha) interior = interior && a > kPruneTol;
            if (interior) {
                lambda = alpha;
                break;
            }
            double step = 1.0;
            std::size_t blocking = 0;
            for (std::size_t k = 0; k < corral.size(); ++k) {
                if (alpha[k] <= kPruneTol) {
                    const double denom = lambda[k] - alpha[k];
                    const double t = denom > 0.0 ? lambda[k] / denom : 0.0;
                    if (t < step) {
                        step = t;
                        blocking = k;
                    }
                }
            }
            for (std::size_t k = 0; k < corral.size(); ++k) {
                lambda[k] = (1.0 - step) * lambda[k] + step * alpha[k];
            }
            lambda[blocking] = 0.0;

            std::vector<std::size_t> kept_idx;
            std::vector<double> kept_w;
            for (std::size_t k = 0; k < corral.size(); ++k) {
                if (lambda[k] > kPruneTol) {
                    kept_idx.push_back(corral[k]);
                    kept_w.push_back(lambda[k]);
                }
            }
            double total = 0.0;
            for (double w : kept_w) total += w;
            for (double& w : kept_w) w /= total;
            corral = std::move(kept_idx);
            lambda = std::move(kept_w);
            if (corral.size() == 1) {
                lambda = {1.0};
                break;
            }
        }
        x = combine(bundle, corral, lambda);
    }

    std::vector<double> theta(q, 0.0);
    for (std::size_t k = 0; k < corral.size(); ++k) theta[corral[k]] = lambda[k];
    return make_result(std::move(x), std::move(theta));
}

} // namespace

GradientBundle::GradientBundle(std::vector<Vector> vectors) : vectors_(std::move(vectors)) {
    if (vectors_.empty()) throw InvalidInput("GradientBundle: at least one vector required");
    const auto d = vectors_.front().size();
    if (d < 1) throw InvalidInput("GradientBundle: dimension must be >= 1");
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
        if (vectors_[i].size() != d) {
            throw InvalidInput("GradientBundle: vector " + std::to_string(i) + " has dimension " +
                               std::to_string(vectors_[i].size()) + ", expected " + std::to_string(d));
        }
    }
}

MinNormResult min_norm_point_pair(const Vector& g1, const Vector& g2) {
    if (g1.size() != g2.size()) throw InvalidInput("min_norm_point_pair: dimension mismatch");
    require_finite(g1, 0);
    require_finite(g2, 1);
    const Vector diff = g1 - g2;
    const double denom = diff.squaredNorm();
    double t = 0.0;
    if (denom > 0.0) t = std::clamp(diff.dot(g1) / denom, 0.0, 1.0);
    if (t == 0.0) return make_result(g1, {1.0, 0.0});
    if (t == 1.0) return make_result(g2, {0.0, 1.0});
    return make_result(g1 - t * diff, {1.0 - t, t});
}

MinNormResult min_norm_point(const GradientBundle& bundle, double tol) {
    if (!(tol > 0.0)) throw InvalidInput("min_norm_point: tol must be > 0");
    for (std::size_t i = 0; i < bundle.count(); ++i) require_finite(bundle[i], i);
    switch (bundle.count()) {
    case 1: return make_result(bundle[0], {1.0});
    case 2: return min_norm_point_pair(bundle[0], bundle[1]);
    default: return wolfe(bundle, tol);
    }
}

MinNormResult brute_force_min_norm(const GradientBundle& bundle, int resolution) {
    const std::size_t q = bundle.count();
    if (q > 4) throw UnsupportedSize("brute_force_min_norm: at most 4 vectors supported");
    if (resolution < 1) throw InvalidInput("brute_force_min_norm: resolution must be >= 1");

    // Pad to four vertices with copies of the first; padded weights stay zero.
    std::vector<Vector> g(4, bundle[0]);
    for (std::size_t i = 0; i < q; ++i) g[i] = bundle[i];
    const int r = resolution;
    const int k1_max = q >= 2 ? r : 0;
    const int k2_max = q >= 3 ? r : 0;
    const int k3_max = q >= 4 ? r : 0;

    double best = std::numeric_limits<double>::infinity();
    std::array<int, 4> best_k{r, 0, 0, 0};
    Vector p(bundle.dim());
    for (int k1 = 0; k1 <= k1_max; ++k1) {
        for (int k2 = 0; k2 <= std::min(k2_max, r - k1); ++k2) {
            for (int k3 = 0; k3 <= std::min(k3_max, r - k1 - k2); ++k3) {
                const int k0 = r - k1 - k2 - k3;
                p = k0 * g[0] + k1 * g[1] + k2 * g[2] + k3 * g[3];
                const double n2 = p.squaredNorm();
                if (n2 < best) {
                    best = n2;
                    best_k = {k0, k1, k2, k3};
                }
            }
        }
    }
    std::vector<double> theta(q);
    Vector point = Vector::Zero(bundle.dim());
    for (std::size_t i = 0; i < q; ++i) {
        theta[i] = static_cast<double>(best_k[i]) / r;
        point += theta[i] * bundle[i];
    }
    return make_result(std::move(point), std::move(theta));
}

double duality_gap(const GradientBundle& bundle, const Vector& point) {
    double gap = -std::numeric_limits<double>::infinity();
    for (const auto& g : bundle.vectors()) gap = std::max(gap, point.dot(point - g));
    return gap;
}

} // namespace imog
