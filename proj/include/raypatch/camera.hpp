#pragma once

#include "raypatch/errors.hpp"
#include "raypatch/math.hpp"

#include <string>

namespace raypatch {

inline constexpr double kDefaultNearPlane = 0.1;  // meters

/// Pinhole camera. `pose` maps world coordinates into the camera frame
/// (x right, y down, z along the optical axis). Pixel (u, v) covers the
/// continuous square [u, u+1) x [v, v+1); its center is (u+0.5, v+0.5).
struct Camera {
    double fx = 0, fy = 0;
    double cx = 0, cy = 0;
    int width = 0, height = 0;
    RigidTransform pose;  // world -> camera

    void validate() const {
        if (!(fx > 0) || !(fy > 0))
            throw ValidationError("camera: focal lengths must be positive");
        if (!(cx >= 0 && cx < width) || !(cy >= 0 && cy < height))
            throw ValidationError("camera: principal point outside image");
        if (width <= 0 || height <= 0)
            throw ValidationError("camera: non-positive image size");
        if (!pose.is_rigid())
            throw ValidationError("camera: pose rotation is not orthonormal");
    }

    Vec3 to_camera(const Vec3& p_world) const { return pose.apply(p_world); }

    Vec3 to_world(const Vec3& p_cam) const { return pose.inverse().apply(p_cam); }

    /// K^{-1} * (u, v, 1) * z: camera-frame point at depth z behind
    /// continuous pixel coordinate (u, v).
    Vec3 backproject(double u, double v, double z) const {
        return {(u - cx) / fx * z, (v - cy) / fy * z, z};
    }

    /// Unit world-frame direction of the viewing ray through (u, v).
    Vec3 pixel_ray_world(double u, double v) const {
        const Vec3 dir_cam = backproject(u, v, 1.0).normalized();
        return pose.rotation.transpose() * dir_cam;
    }

    Vec3 center_world() const { return pose.inverse().translation; }
};

struct ProjectedPoint {
    double u = 0, v = 0;  // continuous pixel coordinates
    double z = 0;         // camera-frame depth, meters

    bool inside(const Camera& cam) const {
        return u >= 0 && u < cam.width && v >= 0 && v < cam.height;
    }
};

/// Perspective projection of a world point. Throws BehindCameraError when
/// the camera-frame depth is at or behind the near plane.
inline ProjectedPoint project_point(const Camera& cam, const Vec3& p_world,
                                    double near_plane = kDefaultNearPlane) {
    const Vec3 p = cam.to_camera(p_world);
    if (!(p.z() > near_plane))
        throw BehindCameraError("point at depth " + std::to_string(p.z()) +
                                " m is behind the near plane");
    return {cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy,
            p.z()};
}

}  // namespace raypatch
