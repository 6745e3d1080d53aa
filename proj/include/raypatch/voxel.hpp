#pragma once

#include "raypatch/box.hpp"
#include "raypatch/errors.hpp"
#include "raypatch/lidar.hpp"
#include "raypatch/math.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

namespace raypatch {

/// Occupancy grid spanning [delta_min, delta_max] of a box frame.
/// Storage is row-major with x fastest.
struct VoxelGrid {
    BoxFrame frame;
    std::array<int, 3> resolution{1, 1, 1};
    Vec3 voxel_size = Vec3::Zero();  // (delta_max - delta_min) / resolution
    std::vector<std::uint8_t> occupancy;

    VoxelGrid() = default;
    VoxelGrid(const BoxFrame& f, std::array<int, 3> res) : frame(f), resolution(res) {
        if (res[0] < 1 || res[1] < 1 || res[2] < 1)
            throw ValidationError("voxel grid: resolution must be >= 1");
        for (int k = 0; k < 3; ++k)
            voxel_size[k] =
                (frame.delta_max[k] - frame.delta_min[k]) / resolution[k];
        occupancy.assign(static_cast<std::size_t>(res[0]) * res[1] * res[2], 0);
    }

    std::size_t flat_index(int ix, int iy, int iz) const {
        return static_cast<std::size_t>(ix) +
               static_cast<std::size_t>(resolution[0]) *
                   (static_cast<std::size_t>(iy) +
                    static_cast<std::size_t>(resolution[1]) *
                        static_cast<std::size_t>(iz));
    }
    bool occupied(int ix, int iy, int iz) const {
        return occupancy[flat_index(ix, iy, iz)] != 0;
    }
    void mark(int ix, int iy, int iz) { occupancy[flat_index(ix, iy, iz)] = 1; }

    /// Box-frame coordinate of grid plane `index` along `axis`.
    double boundary(int axis, int index) const {
        return frame.delta_min[axis] + index * voxel_size[axis];
    }

    /// Box-frame center of a voxel.
    Vec3 center_of(int ix, int iy, int iz) const {
        return {boundary(0, ix) + 0.5 * voxel_size.x(),
                boundary(1, iy) + 0.5 * voxel_size.y(),
                boundary(2, iz) + 0.5 * voxel_size.z()};
    }

    std::size_t occupied_count() const {
        std::size_t n = 0;
        for (auto v : occupancy) n += v != 0;
        return n;
    }
};

struct VoxelizeResult {
    VoxelGrid grid;
    std::size_t dropped_points = 0;  // points outside [delta_min, delta_max]
};

/// Containment slack for voxelization, matching the tolerance the fit
/// guarantees for lifted points. Surfaces lying exactly on a box face
/// round both ways at f32 precision; within this band points clamp into
/// the edge cells instead of being dropped.
inline constexpr double kVoxelizeTol = 1e-6;  // meters

/// Marks every voxel containing at least one camera-frame point. Points on
/// the upper box boundary fall into the last cell; points outside the box
/// (beyond kVoxelizeTol) are dropped and counted.
inline VoxelizeResult voxelize_points(const std::vector<Vec3>& points_cam,
                                      const BoxFrame& frame,
                                      std::array<int, 3> resolution,
                                      int dilation_radius = 0) {
    VoxelizeResult out{VoxelGrid(frame, resolution), 0};
    VoxelGrid& g = out.grid;
    for (const Vec3& p : points_cam) {
        const Vec3 q = frame.rotation * p;
        bool inside = true;
        std::array<int, 3> idx{};
        for (int k = 0; k < 3; ++k) {
            if (q[k] < frame.delta_min[k] - kVoxelizeTol ||
                q[k] > frame.delta_max[k] + kVoxelizeTol) {
                inside = false;
                break;
            }
            const double f =
                std::floor((q[k] - frame.delta_min[k]) / g.voxel_size[k]);
            idx[k] = std::min(static_cast<int>(f), g.resolution[k] - 1);
            idx[k] = std::max(idx[k], 0);
        }
        if (!inside) {
            ++out.dropped_points;
            continue;
        }
        g.mark(idx[0], idx[1], idx[2]);
    }
    if (dilation_radius > 0) {
        const VoxelGrid src = g;
        for (int z = 0; z < g.resolution[2]; ++z)
            for (int y = 0; y < g.resolution[1]; ++y)
                for (int x = 0; x < g.resolution[0]; ++x) {
                    if (g.occupied(x, y, z)) continue;
                    bool near = false;
                    for (int dz = -dilation_radius; !near && dz <= dilation_radius; ++dz)
                        for (int dy = -dilation_radius; !near && dy <= dilation_radius; ++dy)
                            for (int dx = -dilation_radius; dx <= dilation_radius; ++dx) {
                                const int nx = x + dx, ny = y + dy, nz = z + dz;
                                if (nx < 0 || ny < 0 || nz < 0 ||
                                    nx >= g.resolution[0] ||
                                    ny >= g.resolution[1] ||
                                    nz >= g.resolution[2])
                                    continue;
                                if (src.occupied(nx, ny, nz)) {
                                    near = true;
                                    break;
                                }
                            }
                    if (near) g.occupancy[g.flat_index(x, y, z)] = 1;
                }
    }
    return out;
}

struct VoxelHit {
    std::array<int, 3> index{};
    double t_entry = 0;  // meters along the ray into this voxel
};

/// Grid walk (Amanatides-Woo). The ray is given in the grid's camera frame;
/// crossing distances are recomputed from plane coordinates at every step so
/// they match a per-voxel slab test bit for bit instead of accumulating.
/// A miss returns an empty list.
inline std::vector<VoxelHit> traverse(const VoxelGrid& grid, const Vec3& origin_cam,
                                      const Vec3& dir_cam) {
    std::vector<VoxelHit> hits;
    const Vec3 o = grid.frame.rotation * origin_cam;
    const Vec3 d = grid.frame.rotation * dir_cam;

    // The outer slab planes are expressed as grid boundaries (index 0 and
    // n), not as delta_min/delta_max, so crossing distances agree bit for
    // bit with a per-voxel slab test.
    double t_enter = 0.0;
    double t_exit = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
        const double lo = grid.boundary(k, 0);
        const double hi = grid.boundary(k, grid.resolution[k]);
        if (d[k] == 0.0) {
            if (o[k] < lo || o[k] > hi) return hits;
            continue;
        }
        const double t1 = (lo - o[k]) / d[k];
        const double t2 = (hi - o[k]) / d[k];
        t_enter = std::max(t_enter, std::min(t1, t2));
        t_exit = std::min(t_exit, std::max(t1, t2));
    }
    if (t_enter > t_exit) return hits;

    const Vec3 entry = o + t_enter * d;
    std::array<int, 3> idx{};
    std::array<int, 3> step{};
    for (int k = 0; k < 3; ++k) {
        const double f = std::floor((entry[k] - grid.frame.delta_min[k]) /
                                    grid.voxel_size[k]);
        idx[k] = std::clamp(static_cast<int>(f), 0, grid.resolution[k] - 1);
        step[k] = d[k] > 0.0 ? 1 : (d[k] < 0.0 ? -1 : 0);
    }

    auto next_crossing = [&](int k) {
        if (step[k] == 0) return std::numeric_limits<double>::infinity();
        const int plane = idx[k] + (step[k] > 0 ? 1 : 0);
        return (grid.boundary(k, plane) - o[k]) / d[k];
    };

    double t = t_enter;
    const int max_steps =
        grid.resolution[0] + grid.resolution[1] + grid.resolution[2] + 3;
    for (int n = 0; n < max_steps; ++n) {
        hits.push_back({idx, t});
        const std::array<double, 3> tnext{next_crossing(0), next_crossing(1),
                                          next_crossing(2)};
        int k = 0;
        if (tnext[1] < tnext[k]) k = 1;
        if (tnext[2] < tnext[k]) k = 2;
        if (tnext[k] > t_exit) break;
        idx[k] += step[k];
        if (idx[k] < 0 || idx[k] >= grid.resolution[k]) break;
        t = tnext[k];
    }
    return hits;
}

struct RayUpdate {
    std::size_t ray_index = 0;
    double old_range = 0;  // kNoReturn when the beam had no echo
    double new_range = 0;
    std::array<int, 3> hit_voxel{};
};

enum class RangeMode {
    kVoxelEntry,   // range = distance where the ray enters the voxel
    kVoxelCenter,  // range = distance from the sensor to the voxel center
};

struct UpdateResult {
    LidarScan scan;
    std::vector<RayUpdate> updates;  // ascending ray index
};

/// Rewrites ray ranges against the occupied voxels of `grid`. A ray gains a
/// return (or a closer one) when its first occupied voxel lies in front of
/// its existing echo; an echo already in front of the object keeps
/// occluding it. `scan_to_camera` maps scan coordinates into the grid's
/// camera frame (identity when the scan is already there). Rays are
/// independent, so `threads > 1` partitions them by index and the result is
/// identical to the serial one.
inline UpdateResult update_rays(
    const LidarScan& scan, const VoxelGrid& grid,
    const RigidTransform& scan_to_camera = RigidTransform::identity(),
    RangeMode mode = RangeMode::kVoxelEntry, int threads = 1) {
    UpdateResult out;
    out.scan = scan;

    auto process = [&](std::size_t i) -> std::optional<RayUpdate> {
        const LidarRay& ray = scan.rays[i];
        const Vec3 o = scan_to_camera.apply(ray.origin);
        const Vec3 d = scan_to_camera.rotation * ray.direction;
        for (const VoxelHit& hit : traverse(grid, o, d)) {
            if (!grid.occupied(hit.index[0], hit.index[1], hit.index[2]))
                continue;
            double candidate = hit.t_entry;
            if (mode == RangeMode::kVoxelCenter) {
                const Vec3 center_cam =
                    grid.frame.rotation.transpose() *
                    grid.center_of(hit.index[0], hit.index[1], hit.index[2]);
                candidate = (center_cam - o).norm();
            }
            if (!(candidate > 0)) continue;  // sensor inside the voxel
            // Compare and record at the range's storage precision so a
            // second application is a no-op.
            const float stored = static_cast<float>(candidate);
            if (!ray.has_return() || stored < ray.range)
                return RayUpdate{i, static_cast<double>(ray.range),
                                 static_cast<double>(stored), hit.index};
            return std::nullopt;  // occluded by the existing echo
        }
        return std::nullopt;
    };

    std::vector<std::optional<RayUpdate>> slots(scan.rays.size());
    const std::size_t n = scan.rays.size();
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) slots[i] = process(i);
    } else {
        const std::size_t workers =
            std::min<std::size_t>(static_cast<std::size_t>(threads), n);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += workers)
                    slots[i] = process(i);
            });
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < n; ++i)
        if (slots[i]) {
            out.scan.rays[i].range = static_cast<float>(slots[i]->new_range);
            out.updates.push_back(*slots[i]);
        }
    return out;
}

}  // namespace raypatch
