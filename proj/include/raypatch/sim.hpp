#pragma once

#include "raypatch/box.hpp"
#include "raypatch/camera.hpp"
#include "raypatch/depth.hpp"
#include "raypatch/errors.hpp"
#include "raypatch/lidar.hpp"
#include "raypatch/math.hpp"
#include "raypatch/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace raypatch {

/// Analytic solid with a closed-form or root-found ray intersection.
/// `pose` maps local coordinates to the scene (world) frame.
struct Primitive {
    enum class Kind { kSphere, kCuboid, kSuperellipsoid };

    Kind kind = Kind::kSphere;
    RigidTransform pose;          // local -> world
    Vec3 radii = Vec3::Ones();    // sphere uses x; cuboid: half extents
    // Superellipsoid shape pair (e1 vertical, e2 horizontal), Barr's
    // convention: 1 = ellipsoid, smaller = boxier, larger = pinched.
    Vec2 exponents{1.0, 1.0};

    void validate() const {
        if (!(radii.x() > 0 && radii.y() > 0 && radii.z() > 0))
            throw ValidationError("primitive: extents must be positive");
        if (kind == Kind::kSuperellipsoid &&
            !(exponents.x() > 0 && exponents.y() > 0))
            throw ValidationError("primitive: exponents must be positive");
        if (!pose.is_rigid())
            throw ValidationError("primitive: pose is not rigid");
    }

    /// Implicit superellipsoid function, negative inside.
    double implicit(const Vec3& local) const {
        const double e1 = exponents.x(), e2 = exponents.y();
        const double fx = std::pow(std::abs(local.x() / radii.x()), 2.0 / e2);
        const double fy = std::pow(std::abs(local.y() / radii.y()), 2.0 / e2);
        const double fz = std::pow(std::abs(local.z() / radii.z()), 2.0 / e1);
        return std::pow(fx + fy, e2 / e1) + fz - 1.0;
    }

    /// Nearest intersection distance t > 0 along a unit world ray, if any.
    std::optional<double> intersect(const Vec3& origin,
                                    const Vec3& dir) const {
        const Mat3 rt = pose.rotation.transpose();
        const Vec3 o = rt * (origin - pose.translation);
        const Vec3 d = rt * dir;
        switch (kind) {
            case Kind::kSphere: {
                const double r = radii.x();
                const double b = o.dot(d);
                const double c = o.squaredNorm() - r * r;
                const double disc = b * b - c;
                if (disc < 0) return std::nullopt;
                const double s = std::sqrt(disc);
                const double t0 = -b - s, t1 = -b + s;
                if (t0 > 1e-12) return t0;
                if (t1 > 1e-12) return t1;
                return std::nullopt;
            }
            case Kind::kCuboid: {
                double t_enter = -std::numeric_limits<double>::infinity();
                double t_exit = std::numeric_limits<double>::infinity();
                for (int k = 0; k < 3; ++k) {
                    if (d[k] == 0.0) {
                        if (std::abs(o[k]) > radii[k]) return std::nullopt;
                        continue;
                    }
                    const double t1 = (-radii[k] - o[k]) / d[k];
                    const double t2 = (radii[k] - o[k]) / d[k];
                    t_enter = std::max(t_enter, std::min(t1, t2));
                    t_exit = std::min(t_exit, std::max(t1, t2));
                }
                if (t_enter > t_exit) return std::nullopt;
                if (t_enter > 1e-12) return t_enter;
                if (t_exit > 1e-12) return t_exit;
                return std::nullopt;
            }
            case Kind::kSuperellipsoid:
                return intersect_superellipsoid(o, d);
        }
        return std::nullopt;
    }

  private:
    /// Bracketed root find on the implicit function along the ray, seeded
    /// by a fixed-step march across the local bounding box. Resolves the
    /// surface to 1e-9 m.
    std::optional<double> intersect_superellipsoid(const Vec3& o,
                                                   const Vec3& d) const {
        double t_enter = -std::numeric_limits<double>::infinity();
        double t_exit = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 3; ++k) {
            if (d[k] == 0.0) {
                if (std::abs(o[k]) > radii[k]) return std::nullopt;
                continue;
            }
            const double t1 = (-radii[k] - o[k]) / d[k];
            const double t2 = (radii[k] - o[k]) / d[k];
            t_enter = std::max(t_enter, std::min(t1, t2));
            t_exit = std::min(t_exit, std::max(t1, t2));
        }
        t_enter = std::max(t_enter, 1e-12);
        if (t_enter > t_exit) return std::nullopt;

        constexpr int kSteps = 512;
        const double dt = (t_exit - t_enter) / kSteps;
        double t_prev = t_enter;
        double f_prev = implicit(o + t_prev * d);
        for (int i = 1; i <= kSteps; ++i) {
            const double t_cur = t_enter + i * dt;
            const double f_cur = implicit(o + t_cur * d);
            if ((f_prev > 0) != (f_cur > 0)) {
                double lo = t_prev, hi = t_cur;
                while (hi - lo > 1e-10) {
                    const double mid = 0.5 * (lo + hi);
                    if ((implicit(o + mid * d) > 0) == (f_prev > 0))
                        lo = mid;
                    else
                        hi = mid;
                }
                return 0.5 * (lo + hi);
            }
            t_prev = t_cur;
            f_prev = f_cur;
        }
        return std::nullopt;
    }
};

/// Nearest hit across primitives: distance and primitive index.
struct SceneHit {
    double t = std::numeric_limits<double>::infinity();
    int primitive = -1;

    bool valid() const { return primitive >= 0; }
};

inline SceneHit nearest_hit(const std::vector<Primitive>& prims,
                            const Vec3& origin, const Vec3& dir) {
    SceneHit best;
    for (std::size_t i = 0; i < prims.size(); ++i) {
        const auto t = prims[i].intersect(origin, dir);
        if (t && *t < best.t) {
            best.t = *t;
            best.primitive = static_cast<int>(i);
        }
    }
    return best;
}

/// Spinning-scanner layout: rays at the midpoints of a regular
/// azimuth x elevation grid. Ray (a, e) has index e * azimuth_count + a.
/// In the scanner frame x is forward, z up; `pose` maps scanner -> world.
struct ScannerSpec {
    int azimuth_count = 1, elevation_count = 1;
    double azimuth_min = -std::numbers::pi, azimuth_max = std::numbers::pi;
    double elevation_min = 0, elevation_max = 0;
    double max_range = 100.0;  // meters
    RigidTransform pose;

    void validate() const {
        if (azimuth_count < 1 || elevation_count < 1)
            throw ValidationError("scanner: counts must be >= 1");
        if (!(max_range > 0))
            throw ValidationError("scanner: max range must be > 0");
        if (!pose.is_rigid())
            throw ValidationError("scanner: pose is not rigid");
    }

    Vec3 direction_world(int azimuth_index, int elevation_index) const {
        const double az =
            azimuth_min + (azimuth_index + 0.5) *
                              (azimuth_max - azimuth_min) / azimuth_count;
        const double el = elevation_min +
                          (elevation_index + 0.5) *
                              (elevation_max - elevation_min) / elevation_count;
        const Vec3 local(std::cos(el) * std::cos(az),
                         std::cos(el) * std::sin(az), std::sin(el));
        return pose.rotation * local;
    }
};

/// One ray per (azimuth, elevation); range is the nearest intersection or
/// kNoReturn past max_range.
inline LidarScan scan_scene(const ScannerSpec& spec,
                            const std::vector<Primitive>& prims) {
    spec.validate();
    LidarScan scan;
    scan.rays.reserve(static_cast<std::size_t>(spec.azimuth_count) *
                      spec.elevation_count);
    const Vec3 origin = spec.pose.translation;
    for (int e = 0; e < spec.elevation_count; ++e)
        for (int a = 0; a < spec.azimuth_count; ++a) {
            LidarRay ray;
            ray.origin = origin;
            ray.direction = spec.direction_world(a, e);
            const SceneHit hit = nearest_hit(prims, ray.origin, ray.direction);
            ray.range = (hit.valid() && hit.t <= spec.max_range)
                            ? static_cast<float>(hit.t)
                            : kNoReturn;
            scan.rays.push_back(ray);
        }
    return scan;
}

/// Rendered frame: camera-frame depth per pixel (+inf where nothing is
/// hit) and the winning primitive index (-1 where nothing is hit).
struct RenderedView {
    DepthMap depth;                 // metric, camera-frame z
    std::vector<int> primitive_id;  // row-major

    int id_at(int x, int y) const {
        return primitive_id[static_cast<std::size_t>(y) * depth.width + x];
    }
};

inline RenderedView render_view(const Camera& cam,
                                const std::vector<Primitive>& prims) {
    cam.validate();
    RenderedView view;
    view.depth = DepthMap(cam.width, cam.height,
                          std::numeric_limits<float>::infinity());
    view.primitive_id.assign(
        static_cast<std::size_t>(cam.width) * cam.height, -1);
    const Vec3 origin = cam.center_world();
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x) {
            // Ray through the pixel center; t is metric distance, converted
            // to camera-frame depth by the direction's unit z-component.
            const Vec3 dir_cam = cam.backproject(x + 0.5, y + 0.5, 1.0);
            const double inv_norm = 1.0 / dir_cam.norm();
            const Vec3 dir_world = cam.pose.rotation.transpose() *
                                   (dir_cam * inv_norm);
            const SceneHit hit = nearest_hit(prims, origin, dir_world);
            if (!hit.valid()) continue;
            view.depth.at(x, y) = static_cast<float>(hit.t * inv_norm);
            view.primitive_id[static_cast<std::size_t>(y) * cam.width + x] =
                hit.primitive;
        }
    return view;
}

/// Per-pixel nearest-intersection camera-frame depth; +inf where no hit.
inline DepthMap render_depth(const Camera& cam,
                             const std::vector<Primitive>& prims) {
    return render_view(cam, prims).depth;
}

}  // namespace raypatch
