#pragma once

#include "raypatch/camera.hpp"
#include "raypatch/depth.hpp"
#include "raypatch/errors.hpp"
#include "raypatch/lidar.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace raypatch {

/// One background pixel: relative depth paired with the metric camera-frame
/// depth of the LiDAR return that projects there.
struct Correspondence {
    double rel_depth = 0;     // d
    double metric_depth = 0;  // z, meters, > 0
};

/// Projects every LiDAR return into the image, keeps the ones landing
/// inside the depth raster but outside the object mask, and pairs the
/// nearest pixel's relative depth with the return's camera-frame depth.
/// Lookup is nearest pixel, no interpolation.
inline std::vector<Correspondence> background_correspondences(
    const LidarScan& scan, const Camera& cam, const DepthMap& depth,
    const ObjectMask& object_mask, double near_plane = kDefaultNearPlane) {
    if (!object_mask.same_shape(depth.width, depth.height))
        throw DimensionMismatchError("correspondences: mask/depth shape");
    std::vector<Correspondence> pairs;
    pairs.reserve(scan.rays.size() / 4);
    for (const auto& ray : scan.rays) {
        if (!ray.has_return()) continue;
        ProjectedPoint proj;
        try {
            proj = project_point(cam, ray.hit_point(), near_plane);
        } catch (const BehindCameraError&) {
            continue;
        }
        if (!proj.inside(cam)) continue;
        const Vec2 raster = depth.frame.to_raster(proj.u, proj.v);
        const int px = static_cast<int>(std::floor(raster.x()));
        const int py = static_cast<int>(std::floor(raster.y()));
        if (px < 0 || px >= depth.width || py < 0 || py >= depth.height)
            continue;
        if (object_mask.at(px, py)) continue;
        const float d = depth.at(px, py);
        if (!std::isfinite(d)) continue;
        pairs.push_back({static_cast<double>(d), proj.z});
    }
    if (pairs.size() < 2)
        throw TooFewCorrespondencesError(
            "correspondences: need at least 2 background pairs, got " +
            std::to_string(pairs.size()));
    return pairs;
}

}  // namespace raypatch
