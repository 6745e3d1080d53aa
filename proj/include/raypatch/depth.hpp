#pragma once

#include "raypatch/errors.hpp"
#include "raypatch/math.hpp"
#include "raypatch/raster.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace raypatch {

/// Affine map between this raster's continuous coordinates and full-frame
/// pixel coordinates: full = origin + raster / scale. Identity when the
/// raster already covers the full frame.
struct RasterToFrame {
    double x0 = 0, y0 = 0;
    double scale = 1.0;

    static RasterToFrame from_crop(const SquareCrop& c) {
        return {static_cast<double>(c.x0), static_cast<double>(c.y0), c.scale};
    }
    Vec2 to_full(double xr, double yr) const {
        return {x0 + xr / scale, y0 + yr / scale};
    }
    Vec2 to_raster(double uf, double vf) const {
        return {(uf - x0) * scale, (vf - y0) * scale};
    }
};

/// Single-channel float raster. Pipeline inputs hold relative depth
/// (dimensionless, larger = farther); the synthetic renderer also uses it
/// for metric depth, where +inf marks pixels with no surface.
struct DepthMap {
    int width = 0, height = 0;
    std::vector<float> values;  // row-major
    RasterToFrame frame;

    DepthMap() = default;
    DepthMap(int w, int h, float fill = 0.f)
        : width(w), height(h),
          values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h),
                 fill) {}

    float at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    float& at(int x, int y) {
        return values[static_cast<std::size_t>(y) * width + x];
    }

    void validate() const {
        if (width <= 0 || height <= 0)
            throw ValidationError("depth map: non-positive dimensions");
        if (values.size() != static_cast<std::size_t>(width) * height)
            throw ValidationError("depth map: value count mismatch");
        for (const float v : values)
            if (!std::isfinite(v))
                throw ValidationError("depth map: non-finite value");
    }

    std::pair<float, float> minmax_in(const ObjectMask& mask) const {
        float lo = std::numeric_limits<float>::infinity(), hi = -lo;
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                if (mask.at(x, y)) {
                    lo = std::min(lo, at(x, y));
                    hi = std::max(hi, at(x, y));
                }
        return {lo, hi};
    }
};

/// Central-difference gradient magnitude at (x, y); one-sided differences
/// at the raster border.
inline double depth_gradient_magnitude(const DepthMap& d, int x, int y) {
    double gx, gy;
    if (x == 0)
        gx = d.width > 1 ? static_cast<double>(d.at(1, y)) - d.at(0, y) : 0.0;
    else if (x == d.width - 1)
        gx = static_cast<double>(d.at(x, y)) - d.at(x - 1, y);
    else
        gx = (static_cast<double>(d.at(x + 1, y)) - d.at(x - 1, y)) * 0.5;
    if (y == 0)
        gy = d.height > 1 ? static_cast<double>(d.at(x, 1)) - d.at(x, 0) : 0.0;
    else if (y == d.height - 1)
        gy = static_cast<double>(d.at(x, y)) - d.at(x, y - 1);
    else
        gy = (static_cast<double>(d.at(x, y + 1)) - d.at(x, y - 1)) * 0.5;
    return std::sqrt(gx * gx + gy * gy);
}

/// Drops mask pixels whose depth gradient magnitude exceeds `threshold`
/// (relative-depth units per pixel). Filters the "leaking depth" ring where
/// object boundaries blend into the background.
inline ObjectMask depth_gradient_filter(const DepthMap& depth,
                                        const ObjectMask& mask,
                                        double threshold) {
    if (!mask.same_shape(depth.width, depth.height))
        throw DimensionMismatchError("gradient filter: mask/depth shape");
    if (!(threshold > 0))
        throw ValidationError("gradient filter: threshold must be > 0");
    ObjectMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y) &&
                depth_gradient_magnitude(depth, x, y) <= threshold)
                out.set(x, y);
    return out;
}

/// Default gradient threshold: 5% of the relative-depth span inside the
/// mask, per pixel.
inline double default_gradient_threshold(const DepthMap& depth,
                                         const ObjectMask& mask) {
    const auto [lo, hi] = depth.minmax_in(mask);
    if (!(hi > lo)) return std::numeric_limits<double>::infinity();
    return 0.05 * (static_cast<double>(hi) - lo);
}

}  // namespace raypatch
