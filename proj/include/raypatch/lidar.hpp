#pragma once

#include "raypatch/box.hpp"
#include "raypatch/errors.hpp"
#include "raypatch/math.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace raypatch {

/// Beam with no detected echo.
inline constexpr float kNoReturn = std::numeric_limits<float>::infinity();

struct LidarRay {
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitZ();  // unit length
    float range = kNoReturn;         // meters, kNoReturn when no echo

    bool has_return() const { return std::isfinite(range); }
    Vec3 hit_point() const { return origin + static_cast<double>(range) * direction; }
};

struct LidarScan {
    std::vector<LidarRay> rays;
    int frame_id = 0;

    /// Direction tolerance is 1e-9 for scans built in memory; loaders pass
    /// 1e-6 because the file format stores directions as f32.
    void validate(double dir_tol = 1e-9) const {
        for (const auto& r : rays) {
            if (std::abs(r.direction.norm() - 1.0) > dir_tol)
                throw ValidationError("scan: ray direction is not unit length");
            if (r.has_return() && !(r.range > 0))
                throw ValidationError("scan: ray range must be positive");
        }
    }
};

struct RemovedReturn {
    std::size_t ray_index = 0;
    Vec3 point = Vec3::Zero();
    double range = 0;
};

enum class RemovePolicy {
    kSetNoReturn,  // keep the beam, clear its echo
    kDrop,         // delete the beam from the scan
};

struct RemoveResult {
    LidarScan scan;
    std::vector<RemovedReturn> removed;  // ground-truth points, scan order
};

/// Removes returns falling inside the box. The removed points double as
/// the ground-truth object surface for evaluation.
inline RemoveResult remove_points_in_box(
    const LidarScan& scan, const BBox3D& box,
    RemovePolicy policy = RemovePolicy::kSetNoReturn) {
    box.validate();
    RemoveResult out;
    out.scan.frame_id = scan.frame_id;
    out.scan.rays.reserve(scan.rays.size());
    for (std::size_t i = 0; i < scan.rays.size(); ++i) {
        const LidarRay& ray = scan.rays[i];
        if (ray.has_return() && point_in_box(box, ray.hit_point())) {
            out.removed.push_back({i, ray.hit_point(), ray.range});
            if (policy == RemovePolicy::kSetNoReturn) {
                LidarRay cleared = ray;
                cleared.range = kNoReturn;
                out.scan.rays.push_back(cleared);
            }
        } else {
            out.scan.rays.push_back(ray);
        }
    }
    return out;
}

}  // namespace raypatch
