#pragma once

#include "raypatch/camera.hpp"
#include "raypatch/errors.hpp"
#include "raypatch/math.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace raypatch {

/// Oriented 3D box: center and size in meters, yaw about the frame z axis
/// applied first, then pitch about the rotated y axis.
struct BBox3D {
    Vec3 center = Vec3::Zero();
    Vec3 size = Vec3::Zero();  // (l, w, h)
    double yaw = 0;
    double pitch = 0;

    void validate() const {
        if (!(size.x() > 0 && size.y() > 0 && size.z() > 0))
            throw ValidationError("box: size must be positive");
    }

    BBox3D normalized() const {
        BBox3D b = *this;
        b.yaw = normalize_angle(yaw);
        b.pitch = normalize_angle(pitch);
        return b;
    }

    /// Box-local -> parent-frame rotation.
    Mat3 rotation() const { return rot_z(yaw) * rot_y(pitch); }

    Vec3 half_extent() const { return size * 0.5; }

    /// Corner i has local coordinate +size/2 on axis k when bit k of i is
    /// set, -size/2 otherwise (bit 0 = l, bit 1 = w, bit 2 = h).
    std::array<Vec3, 8> corners() const {
        const Mat3 r = rotation();
        const Vec3 h = half_extent();
        std::array<Vec3, 8> out;
        for (int i = 0; i < 8; ++i) {
            const Vec3 local((i & 1) ? h.x() : -h.x(),
                             (i & 2) ? h.y() : -h.y(),
                             (i & 4) ? h.z() : -h.z());
            out[static_cast<std::size_t>(i)] = center + r * local;
        }
        return out;
    }
};

/// Per-frame box sequence with constant size.
struct BoxTrack {
    std::vector<std::pair<int, BBox3D>> frames;

    void validate() const {
        for (std::size_t i = 0; i < frames.size(); ++i) {
            frames[i].second.validate();
            if (i > 0) {
                if (frames[i].first <= frames[i - 1].first)
                    throw ValidationError(
                        "box track: frame indices must be strictly increasing");
                if (!frames[i].second.size.isApprox(frames[0].second.size, 0.0))
                    throw ValidationError(
                        "box track: size must be constant across the track");
            }
        }
    }

    const BBox3D& at_frame(int frame) const {
        for (const auto& [idx, box] : frames)
            if (idx == frame) return box;
        throw ValidationError("box track: no box for frame " +
                              std::to_string(frame));
    }
};

/// Box-aligned coordinates seen from the camera: `rotation` maps
/// camera-frame points onto the box axes, and a point p lies inside the box
/// iff delta_min <= rotation * p <= delta_max componentwise.
struct BoxFrame {
    Mat3 rotation = Mat3::Identity();  // camera -> box-aligned
    Vec3 delta_min = Vec3::Zero();
    Vec3 delta_max = Vec3::Zero();
    Vec3 half_extent = Vec3::Zero();
};

/// delta_min = R*b - b0 and delta_max = R*b + b0 with b the box center in
/// camera coordinates and b0 the half extents.
inline BoxFrame box_frame(const BBox3D& box, const Camera& cam) {
    BoxFrame f;
    f.rotation = (cam.pose.rotation * box.rotation()).transpose();
    f.half_extent = box.half_extent();
    const Vec3 rb = f.rotation * cam.to_camera(box.center);
    f.delta_min = rb - f.half_extent;
    f.delta_max = rb + f.half_extent;
    return f;
}

/// Componentwise containment with a 1e-6 m slack: scan ranges are stored
/// as f32, so a return computed on a box face can land a few 1e-7 m
/// outside and must still classify as inside.
inline bool point_in_box(const BBox3D& box, const Vec3& p, double tol = 1e-6) {
    const Vec3 local = box.rotation().transpose() * (p - box.center);
    const Vec3 h = box.half_extent();
    return std::abs(local.x()) <= h.x() + tol &&
           std::abs(local.y()) <= h.y() + tol &&
           std::abs(local.z()) <= h.z() + tol;
}

/// Projects all 8 corners (corner order as BBox3D::corners). Throws
/// BehindCameraError when any corner is at or behind the near plane;
/// partially visible boxes are rejected rather than clipped.
inline std::array<ProjectedPoint, 8> project_box_corners(
    const Camera& cam, const BBox3D& box,
    double near_plane = kDefaultNearPlane) {
    std::array<ProjectedPoint, 8> out;
    const auto corners = box.corners();
    for (std::size_t i = 0; i < 8; ++i)
        out[i] = project_point(cam, corners[i], near_plane);
    return out;
}

}  // namespace raypatch
