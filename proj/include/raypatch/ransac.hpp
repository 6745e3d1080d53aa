#pragma once

#include "raypatch/correspond.hpp"
#include "raypatch/errors.hpp"
#include "raypatch/math.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace raypatch {

/// Affine map from relative to metric depth: z = alpha * d + beta.
struct AffineDepthParams {
    double alpha = 1.0;  // meters per relative-depth unit, > 0
    double beta = 0.0;   // meters
    std::size_t inlier_count = 0;
    double residual_rms = 0.0;  // meters, over the inlier set
};

namespace detail {

/// Least squares for z = alpha*d + beta over the given indices.
inline bool affine_least_squares(const std::vector<Correspondence>& pairs,
                                 const std::vector<std::uint32_t>& idx,
                                 double& alpha, double& beta) {
    double sd = 0, sz = 0, sdd = 0, sdz = 0;
    for (const auto i : idx) {
        sd += pairs[i].rel_depth;
        sz += pairs[i].metric_depth;
        sdd += pairs[i].rel_depth * pairs[i].rel_depth;
        sdz += pairs[i].rel_depth * pairs[i].metric_depth;
    }
    const double n = static_cast<double>(idx.size());
    const double det = n * sdd - sd * sd;
    if (std::abs(det) < 1e-30) return false;
    alpha = (n * sdz - sd * sz) / det;
    beta = (sz * sdd - sd * sdz) / det;
    return true;
}

}  // namespace detail

inline constexpr int kDefaultRansacIterations = 1000;
inline constexpr double kDefaultInlierTol = 0.05;  // meters

/// Two-point RANSAC for the affine depth map. Each iteration samples two
/// distinct pairs, solves z = alpha*d + beta exactly, rejects hypotheses
/// with alpha <= 0, and scores by inliers within `inlier_tol`. The final
/// parameters are a least-squares refit on the best inlier set. The
/// hypothesis stream depends only on (seed, iteration), so results are
/// reproducible bit for bit.
inline AffineDepthParams ransac_affine_fit(
    const std::vector<Correspondence>& pairs, double inlier_tol,
    int iterations, std::uint64_t seed) {
    if (pairs.size() < 2)
        throw TooFewCorrespondencesError("ransac: need at least 2 pairs");
    if (!(inlier_tol > 0))
        throw ValidationError("ransac: inlier_tol must be > 0");
    if (iterations <= 0)
        throw ValidationError("ransac: iterations must be > 0");

    bool depths_vary = false;
    for (const auto& p : pairs)
        if (p.rel_depth != pairs[0].rel_depth) {
            depths_vary = true;
            break;
        }
    if (!depths_vary)
        throw DegenerateFitError("ransac: all pairs share one relative depth");

    const std::size_t n = pairs.size();
    std::size_t best_count = 0;
    double best_alpha = 0, best_beta = 0;
    for (int it = 0; it < iterations; ++it) {
        SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(it));
        const std::size_t i = rng.below(n);
        std::size_t j = rng.below(n - 1);
        if (j >= i) ++j;
        const double dd = pairs[i].rel_depth - pairs[j].rel_depth;
        if (dd == 0.0) continue;
        const double alpha =
            (pairs[i].metric_depth - pairs[j].metric_depth) / dd;
        if (!(alpha > 0)) continue;
        const double beta = pairs[i].metric_depth - alpha * pairs[i].rel_depth;
        std::size_t count = 0;
        for (const auto& p : pairs)
            if (std::abs(p.metric_depth - (alpha * p.rel_depth + beta)) <=
                inlier_tol)
                ++count;
        if (count > best_count) {
            best_count = count;
            best_alpha = alpha;
            best_beta = beta;
        }
    }
    if (best_count == 0)
        throw NoPositiveScaleError("ransac: no hypothesis with alpha > 0");

    std::vector<std::uint32_t> inliers;
    inliers.reserve(best_count);
    for (std::uint32_t i = 0; i < n; ++i)
        if (std::abs(pairs[i].metric_depth -
                     (best_alpha * pairs[i].rel_depth + best_beta)) <=
            inlier_tol)
            inliers.push_back(i);

    double alpha = best_alpha, beta = best_beta;
    if (!detail::affine_least_squares(pairs, inliers, alpha, beta) ||
        !(alpha > 0)) {
        // Refit degenerate or flipped: report the raw hypothesis instead.
        alpha = best_alpha;
        beta = best_beta;
    }

    AffineDepthParams out;
    out.alpha = alpha;
    out.beta = beta;
    double ss = 0;
    out.inlier_count = 0;
    for (const auto& p : pairs) {
        const double r = p.metric_depth - (alpha * p.rel_depth + beta);
        if (std::abs(r) <= inlier_tol) {
            ++out.inlier_count;
            ss += r * r;
        }
    }
    out.residual_rms =
        out.inlier_count ? std::sqrt(ss / static_cast<double>(out.inlier_count))
                         : 0.0;
    return out;
}

}  // namespace raypatch
