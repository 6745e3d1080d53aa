#pragma once

#include "raypatch/box.hpp"
#include "raypatch/camera.hpp"
#include "raypatch/depth.hpp"
#include "raypatch/errors.hpp"
#include "raypatch/lidar.hpp"
#include "raypatch/math.hpp"
#include "raypatch/raster.hpp"
#include "raypatch/sim.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace raypatch {

/// Everything needed to build one synthetic evaluation scene.
struct SceneConfig {
    Camera camera;
    ScannerSpec scanner;
    std::vector<Primitive> background;
    Primitive object;
    BBox3D box;  // world-frame bounding box of the object

    double alpha = 1.0;  // true affine map: metric = alpha * rel + beta
    double beta = 0.0;

    double noise_sigma = 0.0;      // gaussian, relative-depth units
    double outlier_fraction = 0.0; // background pixels replaced by junk
    bool mask_to_hull = false;     // silhouette -> projected-box hull
    bool depth_to_constant = false;// object depth -> box-center depth
    double hull_enlarge_pct = 0.0; // enlargement for the hull analog

    // > 0: replace the spinning scanner with beams through every
    // camera_stride-th pixel center (a solid-state pattern). Each return
    // then lands exactly on the pixel whose depth it is paired with, so
    // zero-noise bundles give exactly affine correspondences.
    int camera_stride = 0;

    std::uint64_t seed = 1;

    void validate() const {
        camera.validate();
        scanner.validate();
        for (const auto& p : background) p.validate();
        object.validate();
        box.validate();
        if (!(alpha > 0)) throw ValidationError("scene: alpha must be > 0");
        if (noise_sigma < 0 || outlier_fraction < 0 || outlier_fraction > 1)
            throw ValidationError("scene: bad noise/outlier config");
        if (hull_enlarge_pct < 0)
            throw ValidationError("scene: hull_enlarge_pct must be >= 0");
        if (camera_stride < 0)
            throw ValidationError("scene: camera_stride must be >= 0");
    }
};

/// Fully known scene: ground truth on both sides of the pipeline.
struct SceneBundle {
    Camera camera;
    BBox3D box;
    LidarScan gt_scan;       // object present
    LidarScan removed_scan;  // object returns cleared, the pipeline input
    std::vector<RemovedReturn> object_returns;  // ground-truth object points
    std::vector<std::size_t> object_ray_ids;    // rays the object produced
    DepthMap rel_depth;      // relative depth, full frame
    ObjectMask mask;         // object mask (exact silhouette unless degraded)
    ObjectMask silhouette;   // exact silhouette, always
    double true_alpha = 1.0;
    double true_beta = 0.0;
    SceneConfig config;
};

/// Beams through every stride-th pixel center of `cam`.
inline LidarScan scan_through_pixels(const Camera& cam, int stride,
                                     const std::vector<Primitive>& prims,
                                     double max_range) {
    LidarScan scan;
    const Vec3 origin = cam.center_world();
    for (int y = stride / 2; y < cam.height; y += stride)
        for (int x = stride / 2; x < cam.width; x += stride) {
            LidarRay ray;
            ray.origin = origin;
            ray.direction = cam.pose.rotation.transpose() *
                            cam.backproject(x + 0.5, y + 0.5, 1.0).normalized();
            const SceneHit hit = nearest_hit(prims, ray.origin, ray.direction);
            ray.range = (hit.valid() && hit.t <= max_range)
                            ? static_cast<float>(hit.t)
                            : kNoReturn;
            scan.rays.push_back(ray);
        }
    return scan;
}

/// Builds the bundle: scans the scene with and without the object's
/// returns, renders relative depth from the true affine map, and applies
/// the configured degradations. Deterministic per seed.
inline SceneBundle make_bundle(const SceneConfig& config) {
    config.validate();
    SceneBundle b;
    b.camera = config.camera;
    b.box = config.box;
    b.true_alpha = config.alpha;
    b.true_beta = config.beta;
    b.config = config;

    std::vector<Primitive> scene = config.background;
    scene.push_back(config.object);
    const int object_id = static_cast<int>(scene.size()) - 1;

    b.gt_scan = config.camera_stride > 0
                    ? scan_through_pixels(config.camera, config.camera_stride,
                                          scene, config.scanner.max_range)
                    : scan_scene(config.scanner, scene);
    const RemoveResult removed = remove_points_in_box(b.gt_scan, config.box);
    b.removed_scan = removed.scan;
    b.object_returns = removed.removed;

    // Oracle labels: rays whose nearest hit is the object primitive.
    for (std::size_t i = 0; i < b.gt_scan.rays.size(); ++i) {
        const LidarRay& ray = b.gt_scan.rays[i];
        if (!ray.has_return()) continue;
        const SceneHit hit = nearest_hit(scene, ray.origin, ray.direction);
        if (hit.primitive == object_id) b.object_ray_ids.push_back(i);
    }

    const RenderedView view = render_view(config.camera, scene);

    b.silhouette = ObjectMask(config.camera.width, config.camera.height);
    for (int y = 0; y < config.camera.height; ++y)
        for (int x = 0; x < config.camera.width; ++x)
            if (view.id_at(x, y) == object_id) b.silhouette.set(x, y);

    b.mask = config.mask_to_hull
                 ? roi_mask_from_box(config.camera, config.box,
                                     config.hull_enlarge_pct)
                 : b.silhouette;

    // Relative depth from the true affine map; sky pixels take the scanner
    // max range so the raster stays finite.
    b.rel_depth = DepthMap(config.camera.width, config.camera.height);
    for (int y = 0; y < config.camera.height; ++y)
        for (int x = 0; x < config.camera.width; ++x) {
            double metric = view.depth.at(x, y);
            if (!std::isfinite(metric)) metric = config.scanner.max_range;
            b.rel_depth.at(x, y) =
                static_cast<float>((metric - config.beta) / config.alpha);
        }

    if (config.depth_to_constant) {
        const double z_center =
            config.camera.to_camera(config.box.center).z();
        const float rel_const =
            static_cast<float>((z_center - config.beta) / config.alpha);
        for (int y = 0; y < config.camera.height; ++y)
            for (int x = 0; x < config.camera.width; ++x)
                if (b.mask.at(x, y)) b.rel_depth.at(x, y) = rel_const;
    }

    if (config.noise_sigma > 0) {
        SplitMix64 rng = SplitMix64::stream(config.seed, 1);
        for (auto& v : b.rel_depth.values)
            v += static_cast<float>(config.noise_sigma * rng.gaussian());
    }

    if (config.outlier_fraction > 0) {
        float lo = std::numeric_limits<float>::infinity(), hi = -lo;
        for (const float v : b.rel_depth.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        SplitMix64 rng = SplitMix64::stream(config.seed, 2);
        for (int y = 0; y < config.camera.height; ++y)
            for (int x = 0; x < config.camera.width; ++x) {
                if (b.silhouette.at(x, y)) continue;  // background only
                if (rng.uniform() < config.outlier_fraction)
                    b.rel_depth.at(x, y) =
                        static_cast<float>(rng.uniform(lo, hi));
            }
    }
    return b;
}

}  // namespace raypatch
