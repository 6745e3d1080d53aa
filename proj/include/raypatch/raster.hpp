#pragma once

#include "raypatch/box.hpp"
#include "raypatch/camera.hpp"
#include "raypatch/errors.hpp"
#include "raypatch/math.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

namespace raypatch {

/// Binary raster, 1 = object.
struct ObjectMask {
    int width = 0, height = 0;
    std::vector<std::uint8_t> bits;

    ObjectMask() = default;
    ObjectMask(int w, int h)
        : width(w), height(h),
          bits(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {}

    bool at(int x, int y) const {
        return bits[static_cast<std::size_t>(y) * width + x] != 0;
    }
    void set(int x, int y, bool v = true) {
        bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }
    std::size_t count() const {
        std::size_t n = 0;
        for (auto b : bits) n += b != 0;
        return n;
    }
    bool same_shape(int w, int h) const { return width == w && height == h; }
};

/// Convex hull (monotone chain). Returns vertices in counterclockwise order
/// for y-up axes; collinear points are dropped.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec2& a, const Vec2& b) {
                              return a.x() == b.x() && a.y() == b.y();
                          }),
              pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;
    auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) -
               (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Vec2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

inline double polygon_area(const std::vector<Vec2>& poly) {
    double twice = 0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        twice += a.x() * b.y() - b.x() * a.y();
    }
    return std::abs(twice) * 0.5;
}

inline Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
    double twice = 0;
    Vec2 c = Vec2::Zero();
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const double w = a.x() * b.y() - b.x() * a.y();
        twice += w;
        c += (a + b) * w;
    }
    if (std::abs(twice) < 1e-30) {
        // Degenerate polygon: fall back to the vertex mean.
        c = Vec2::Zero();
        for (const auto& p : poly) c += p;
        return poly.empty() ? c : Vec2(c / static_cast<double>(poly.size()));
    }
    return c / (3.0 * twice);
}

/// Scanline fill of a convex polygon into a w x h raster. A pixel is set
/// iff its center (u+0.5, v+0.5) lies inside or on the polygon.
inline ObjectMask fill_convex_polygon(const std::vector<Vec2>& poly, int w,
                                      int h) {
    ObjectMask mask(w, h);
    if (poly.size() < 3) return mask;
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (const auto& p : poly) {
        ymin = std::min(ymin, p.y());
        ymax = std::max(ymax, p.y());
    }
    const int v0 = static_cast<int>(
        std::clamp(std::floor(ymin - 0.5), 0.0, static_cast<double>(h)));
    const int v1 = static_cast<int>(
        std::clamp(std::ceil(ymax), -1.0, static_cast<double>(h - 1)));
    const std::size_t n = poly.size();
    for (int v = v0; v <= v1; ++v) {
        const double y = v + 0.5;
        double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = poly[i];
            const Vec2& b = poly[(i + 1) % n];
            if (a.y() == b.y()) {
                if (y == a.y()) {  // horizontal edge on the scanline
                    xlo = std::min({xlo, a.x(), b.x()});
                    xhi = std::max({xhi, a.x(), b.x()});
                }
                continue;
            }
            const double t = (y - a.y()) / (b.y() - a.y());
            if (t < 0.0 || t > 1.0) continue;
            const double x = a.x() + t * (b.x() - a.x());
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
        }
        if (!(xlo <= xhi)) continue;
        const int u0 = static_cast<int>(
            std::clamp(std::ceil(xlo - 0.5), 0.0, static_cast<double>(w)));
        const int u1 = static_cast<int>(
            std::clamp(std::floor(xhi - 0.5), -1.0, static_cast<double>(w - 1)));
        for (int u = u0; u <= u1; ++u) mask.set(u, v);
    }
    return mask;
}

/// Non-rectangular RoI: the filled convex hull of the projected box
/// corners, isotropically enlarged about the hull centroid, clipped to the
/// image. Throws EmptyMaskError when the hull covers less than one pixel.
inline ObjectMask roi_mask_from_box(const Camera& cam, const BBox3D& box,
                                    double enlarge_pct = 0.10,
                                    double near_plane = kDefaultNearPlane) {
    if (enlarge_pct < 0)
        throw ValidationError("roi mask: enlarge_pct must be >= 0");
    const auto projected = project_box_corners(cam, box, near_plane);
    std::vector<Vec2> pts;
    pts.reserve(8);
    for (const auto& p : projected) pts.emplace_back(p.u, p.v);
    std::vector<Vec2> hull = convex_hull(std::move(pts));
    if (hull.size() >= 3 && enlarge_pct > 0) {
        const Vec2 c = polygon_centroid(hull);
        for (auto& p : hull) p = c + (1.0 + enlarge_pct) * (p - c);
    }
    if (hull.size() < 3 || polygon_area(hull) < 1.0)
        throw EmptyMaskError("roi mask: projected hull below one pixel");
    ObjectMask mask = fill_convex_polygon(hull, cam.width, cam.height);
    if (mask.count() == 0)
        throw EmptyMaskError("roi mask: hull covers no pixel centers");
    return mask;
}

/// Square crop in full-frame pixels plus the scale to a target resolution.
/// Continuous coordinates map as crop = (full - origin) * scale.
struct SquareCrop {
    int x0 = 0, y0 = 0;
    int side = 0;
    int target = 0;
    double scale = 1.0;  // target / side

    Vec2 to_crop(const Vec2& full) const {
        return {(full.x() - x0) * scale, (full.y() - y0) * scale};
    }
    Vec2 to_full(const Vec2& crop) const {
        return {x0 + crop.x() / scale, y0 + crop.y() / scale};
    }
};

/// Smallest square crop that encloses the mask's bounding box, shifted
/// inward at image borders when it fits. When the square is larger than an
/// image dimension the origin clamps to 0 and the crop extends past the
/// border (callers pad).
inline SquareCrop square_crop_for_mask(const ObjectMask& mask, int target) {
    if (target <= 0) throw ValidationError("square crop: target must be > 0");
    int minx = mask.width, maxx = -1, miny = mask.height, maxy = -1;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y)) {
                minx = std::min(minx, x);
                maxx = std::max(maxx, x);
                miny = std::min(miny, y);
                maxy = std::max(maxy, y);
            }
    if (maxx < 0) throw EmptyMaskError("square crop: empty mask");
    const int bw = maxx - minx + 1;
    const int bh = maxy - miny + 1;
    SquareCrop crop;
    crop.side = std::max(bw, bh);
    crop.target = target;
    crop.scale = static_cast<double>(target) / crop.side;
    const auto place = [&](int lo, int extent, int image) {
        int origin = lo - (crop.side - extent) / 2;
        origin = std::min(origin, image - crop.side);
        return std::max(origin, 0);
    };
    crop.x0 = place(minx, bw, mask.width);
    crop.y0 = place(miny, bh, mask.height);
    return crop;
}

}  // namespace raypatch
