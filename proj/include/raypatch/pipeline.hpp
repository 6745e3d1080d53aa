#pragma once

#include "raypatch/box.hpp"
#include "raypatch/camera.hpp"
#include "raypatch/correspond.hpp"
#include "raypatch/depth.hpp"
#include "raypatch/errors.hpp"
#include "raypatch/lift.hpp"
#include "raypatch/lidar.hpp"
#include "raypatch/ransac.hpp"
#include "raypatch/raster.hpp"
#include "raypatch/sample.hpp"
#include "raypatch/scale_lp.hpp"
#include "raypatch/voxel.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace raypatch {

struct FitOptions {
    double gradient_threshold = 0;  // <= 0: 5% of the in-mask depth span
    double ransac_tol = kDefaultInlierTol;
    int ransac_iterations = kDefaultRansacIterations;
    std::uint64_t seed = 7;
    double near_plane = kDefaultNearPlane;
    bool invert_disparity = false;  // inputs are raw disparity, flip them
    double min_alpha = kMinAlpha;
};

struct FitResult {
    AffineDepthParams ransac;   // background alignment
    AffineDepthParams lp;       // max-scale solution of the box LP
    AffineDepthParams refined;  // parameters used downstream
    bool lp_engaged = false;    // ransac violated the box and was repaired
    double gradient_threshold = 0;
    std::size_t mask_pixels = 0;
    std::size_t filtered_pixels = 0;   // survivors of the gradient filter
    std::size_t ray_miss_pixels = 0;   // mask pixels whose ray misses the box
    std::size_t correspondences = 0;
    std::vector<PixelSample> samples;  // one per usable filtered pixel
};

/// True when the affine map keeps every sample inside the box, within an
/// absolute tolerance on the box-aligned coordinates.
inline bool params_fit_box(const std::vector<PixelSample>& samples,
                           const BoxFrame& frame,
                           const AffineDepthParams& params,
                           double tol = 1e-6) {
    for (const auto& s : samples) {
        const double t = s.rel_depth * params.alpha + params.beta;
        for (int k = 0; k < 3; ++k) {
            const double x = s.dir_box[k] * t;
            if (x < frame.delta_min[k] - tol || x > frame.delta_max[k] + tol)
                return false;
        }
    }
    return true;
}

/// Gradient filter -> background correspondences -> RANSAC -> scale LP.
/// `scan` must be in the calibration's world frame and must not contain the
/// object (its returns there would contaminate the background fit).
inline FitResult fit_pipeline(const Camera& cam, const LidarScan& scan,
                              DepthMap depth, const ObjectMask& mask,
                              const BBox3D& box, const FitOptions& opt = {}) {
    cam.validate();
    box.validate();
    depth.validate();
    if (opt.invert_disparity)
        for (auto& v : depth.values)
            v = 1.0f / std::max(v, 1e-6f);

    FitResult out;
    out.mask_pixels = mask.count();
    out.gradient_threshold = opt.gradient_threshold > 0
                                 ? opt.gradient_threshold
                                 : default_gradient_threshold(depth, mask);
    const ObjectMask filtered =
        depth_gradient_filter(depth, mask, out.gradient_threshold);
    out.filtered_pixels = filtered.count();

    const auto pairs =
        background_correspondences(scan, cam, depth, mask, opt.near_plane);
    out.correspondences = pairs.size();
    out.ransac = ransac_affine_fit(pairs, opt.ransac_tol,
                                   opt.ransac_iterations, opt.seed);

    const BoxFrame frame = box_frame(box, cam);
    out.samples = object_pixel_samples(depth, filtered, cam, frame);
    // A pixel whose viewing ray cannot meet the box at any depth is mask
    // noise at the silhouette, not object evidence; it cannot constrain
    // the fit for any (alpha, beta).
    std::erase_if(out.samples, [&](const PixelSample& s) {
        double lo, hi;
        const bool hits = depth_interval_for_sample(s, frame, lo, hi);
        out.ray_miss_pixels += !hits;
        return !hits;
    });
    out.lp = refine_scale_lp(out.samples, frame, out.ransac, opt.min_alpha);

    // The refinement exists to make the surface fit the box. A background
    // alignment that already satisfies every constraint is kept as is;
    // otherwise it moves the minimal mean-square depth distance needed to
    // restore containment. (The max-scale solution is reported alongside;
    // lifting with it would stretch an already-valid surface out to the
    // pixel-quantized silhouette bounds.)
    out.lp_engaged = !params_fit_box(out.samples, frame, out.ransac);
    out.refined = out.ransac;
    if (out.lp_engaged) {
        const auto cons = depth_constraints(out.samples, frame);
        const ScaleLpResult proj = project_params_into_box(
            cons, out.ransac.alpha, out.ransac.beta, opt.min_alpha);
        if (proj.status == LpStatus::kOptimal && proj.alpha > 0) {
            out.refined.alpha = proj.alpha;
            out.refined.beta = proj.beta;
        } else {
            out.refined = out.lp;
        }
    }
    return out;
}

struct InpaintOptions {
    FitOptions fit;
    std::array<int, 3> resolution{64, 64, 64};
    int dilation_radius = 0;
    RangeMode range_mode = RangeMode::kVoxelEntry;
    int threads = 1;
};

struct InpaintResult {
    FitResult fit;
    std::size_t lifted_points = 0;
    std::size_t dropped_points = 0;  // lifted points outside the box
    std::size_t occupied_voxels = 0;
    UpdateResult update;
};

/// Full pipeline: fit, lift, voxelize, rewrite ray ranges. The input scan
/// is left untouched; the updated scan is returned.
inline InpaintResult inpaint_pipeline(const Camera& cam, const LidarScan& scan,
                                      const DepthMap& depth,
                                      const ObjectMask& mask, const BBox3D& box,
                                      const InpaintOptions& opt = {}) {
    InpaintResult out;
    out.fit = fit_pipeline(cam, scan, depth, mask, box, opt.fit);
    const std::vector<Vec3> lifted =
        lift_pixels(out.fit.samples, out.fit.refined, cam);
    out.lifted_points = lifted.size();

    const BoxFrame frame = box_frame(box, cam);
    VoxelizeResult vox =
        voxelize_points(lifted, frame, opt.resolution, opt.dilation_radius);
    out.dropped_points = vox.dropped_points;
    out.occupied_voxels = vox.grid.occupied_count();

    out.update = update_rays(scan, vox.grid, cam.pose, opt.range_mode,
                             opt.threads);
    return out;
}

}  // namespace raypatch
