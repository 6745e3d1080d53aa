#pragma once

// Geometry-based LiDAR inpainting: recover an inserted object's metric
// surface from a relative depth map and rewrite intersecting ray ranges.

#include "raypatch/box.hpp"
#include "raypatch/bundle.hpp"
#include "raypatch/camera.hpp"
#include "raypatch/correspond.hpp"
#include "raypatch/depth.hpp"
#include "raypatch/errors.hpp"
#include "raypatch/lidar.hpp"
#include "raypatch/lift.hpp"
#include "raypatch/math.hpp"
#include "raypatch/metrics.hpp"
#include "raypatch/pipeline.hpp"
#include "raypatch/ransac.hpp"
#include "raypatch/raster.hpp"
#include "raypatch/sample.hpp"
#include "raypatch/scale_lp.hpp"
#include "raypatch/sim.hpp"
#include "raypatch/voxel.hpp"
