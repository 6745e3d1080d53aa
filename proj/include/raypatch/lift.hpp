#pragma once

#include "raypatch/camera.hpp"
#include "raypatch/errors.hpp"
#include "raypatch/ransac.hpp"
#include "raypatch/sample.hpp"

#include <string>
#include <vector>

namespace raypatch {

/// Lifts pixels to camera-frame 3D points: K^{-1}*(u,v,1) * (d*alpha+beta).
/// Output order matches input order. Throws NonPositiveDepthError (with the
/// offending index) when the affine map sends a pixel to depth <= 0.
inline std::vector<Vec3> lift_pixels(const std::vector<PixelSample>& samples,
                                     const AffineDepthParams& params,
                                     const Camera& cam) {
    if (!(params.alpha > 0))
        throw ValidationError("lift: alpha must be > 0");
    std::vector<Vec3> points;
    points.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double z = samples[i].rel_depth * params.alpha + params.beta;
        if (!(z > 0))
            throw NonPositiveDepthError("lift: pixel " + std::to_string(i) +
                                        " maps to depth " + std::to_string(z) +
                                        " m");
        points.push_back(cam.backproject(samples[i].u, samples[i].v, z));
    }
    return points;
}

}  // namespace raypatch
