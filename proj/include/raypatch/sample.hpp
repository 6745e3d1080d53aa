#pragma once

#include "raypatch/box.hpp"
#include "raypatch/camera.hpp"
#include "raypatch/depth.hpp"

#include <vector>

namespace raypatch {

/// One inpainted-object pixel. (u, v) are continuous full-frame pixel
/// coordinates; dir_box is R * K^{-1} * (u, v, 1), the pixel's viewing ray
/// expressed on the box axes, so that dir_box * (d*alpha + beta) is the
/// box-aligned position of the lifted point.
struct PixelSample {
    double u = 0, v = 0;
    double rel_depth = 0;
    Vec3 dir_box = Vec3::UnitZ();
};

/// Collects a sample for every mask pixel, mapping raster pixel centers
/// through the raster-to-frame transform.
inline std::vector<PixelSample> object_pixel_samples(const DepthMap& depth,
                                                     const ObjectMask& mask,
                                                     const Camera& cam,
                                                     const BoxFrame& frame) {
    if (!mask.same_shape(depth.width, depth.height))
        throw DimensionMismatchError("pixel samples: mask/depth shape");
    std::vector<PixelSample> samples;
    samples.reserve(mask.count());
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            const Vec2 full = depth.frame.to_full(x + 0.5, y + 0.5);
            PixelSample s;
            s.u = full.x();
            s.v = full.y();
            s.rel_depth = depth.at(x, y);
            s.dir_box = frame.rotation * cam.backproject(s.u, s.v, 1.0);
            samples.push_back(s);
        }
    return samples;
}

}  // namespace raypatch
