#pragma once

#include "raypatch/box.hpp"
#include "raypatch/errors.hpp"
#include "raypatch/lidar.hpp"
#include "raypatch/math.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace raypatch {

/// Pairwise (tree) summation; fixed order, so parallel callers and reruns
/// agree bit for bit.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0;
        for (const double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

enum class AbsRelDenominator {
    kReconstructed,  // |d* - d| / d, as reported
    kGroundTruth,    // |d* - d| / d*, the conventional variant
};

/// Mean absolute relative range error between ground-truth ranges d* and
/// reconstructed ranges d.
inline double absrel(std::span<const double> gt_ranges,
                     std::span<const double> rec_ranges,
                     AbsRelDenominator denom = AbsRelDenominator::kReconstructed) {
    if (gt_ranges.size() != rec_ranges.size())
        throw LengthMismatchError("absrel: list lengths differ");
    if (gt_ranges.empty()) throw LengthMismatchError("absrel: empty lists");
    std::vector<double> terms(gt_ranges.size());
    for (std::size_t i = 0; i < gt_ranges.size(); ++i) {
        const double den = denom == AbsRelDenominator::kReconstructed
                               ? rec_ranges[i]
                               : gt_ranges[i];
        if (!(den > 0))
            throw NonPositiveDenominatorError(
                "absrel: non-positive denominator at index " +
                std::to_string(i));
        terms[i] = std::abs(gt_ranges[i] - rec_ranges[i]) / den;
    }
    return pairwise_sum(terms) / static_cast<double>(terms.size());
}

/// Mean Euclidean distance between index-aligned point lists.
inline double l2_error(std::span<const Vec3> gt_points,
                       std::span<const Vec3> rec_points) {
    if (gt_points.size() != rec_points.size())
        throw LengthMismatchError("l2: list lengths differ");
    if (gt_points.empty()) throw LengthMismatchError("l2: empty lists");
    std::vector<double> terms(gt_points.size());
    for (std::size_t i = 0; i < gt_points.size(); ++i)
        terms[i] = (gt_points[i] - rec_points[i]).norm();
    return pairwise_sum(terms) / static_cast<double>(terms.size());
}

struct MatchedRays {
    std::vector<std::size_t> ray_indices;
    std::vector<double> gt_range, rec_range;
    std::vector<Vec3> gt_point, rec_point;

    std::size_t size() const { return ray_indices.size(); }
};

struct MatchResult {
    MatchedRays object;  // ground-truth return inside the box
    MatchedRays all;
    std::size_t missed_gt_only = 0;   // echo in the ground truth only
    std::size_t missed_rec_only = 0;  // echo in the reconstruction only
};

/// Pairs rays by index between two scans over the same ray grid. Rays where
/// exactly one scan has a return are counted as misses and excluded.
inline MatchResult match_by_ray(const LidarScan& gt, const LidarScan& rec,
                                const BBox3D& box) {
    if (gt.rays.size() != rec.rays.size())
        throw GridMismatchError("match: scans have different ray counts");
    MatchResult out;
    for (std::size_t i = 0; i < gt.rays.size(); ++i) {
        const LidarRay& a = gt.rays[i];
        const LidarRay& b = rec.rays[i];
        if (a.has_return() != b.has_return()) {
            ++(a.has_return() ? out.missed_gt_only : out.missed_rec_only);
            continue;
        }
        if (!a.has_return()) continue;
        const Vec3 pa = a.hit_point();
        const Vec3 pb = b.hit_point();
        out.all.ray_indices.push_back(i);
        out.all.gt_range.push_back(a.range);
        out.all.rec_range.push_back(b.range);
        out.all.gt_point.push_back(pa);
        out.all.rec_point.push_back(pb);
        if (point_in_box(box, pa)) {
            out.object.ray_indices.push_back(i);
            out.object.gt_range.push_back(a.range);
            out.object.rec_range.push_back(b.range);
            out.object.gt_point.push_back(pa);
            out.object.rec_point.push_back(pb);
        }
    }
    return out;
}

struct EvalReport {
    double absrel_object = 0, absrel_all = 0;
    double l2_object = 0, l2_all = 0;  // meters
    std::size_t matched_object = 0, matched_all = 0;
    std::size_t missed_gt_only = 0, missed_rec_only = 0;
    AbsRelDenominator denominator = AbsRelDenominator::kReconstructed;
};

/// Matches two scans and reduces them to the report metrics. Requires at
/// least one matched object ray.
inline EvalReport evaluate_scans(
    const LidarScan& gt, const LidarScan& rec, const BBox3D& box,
    AbsRelDenominator denom = AbsRelDenominator::kReconstructed) {
    const MatchResult m = match_by_ray(gt, rec, box);
    EvalReport r;
    r.denominator = denom;
    r.matched_object = m.object.size();
    r.matched_all = m.all.size();
    r.missed_gt_only = m.missed_gt_only;
    r.missed_rec_only = m.missed_rec_only;
    if (m.object.size() == 0)
        throw LengthMismatchError("evaluate: no matched object rays");
    r.absrel_object = absrel(m.object.gt_range, m.object.rec_range, denom);
    r.absrel_all = absrel(m.all.gt_range, m.all.rec_range, denom);
    r.l2_object = l2_error(m.object.gt_point, m.object.rec_point);
    r.l2_all = l2_error(m.all.gt_point, m.all.rec_point);
    return r;
}

}  // namespace raypatch
