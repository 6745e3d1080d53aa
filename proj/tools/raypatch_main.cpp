// raypatch: geometry-based LiDAR inpainting over documented file formats.
//
// Subcommands: project, fit, inpaint, simulate, evaluate.
// stdout carries one machine-readable JSON document per run; logs go to
// stderr. Exit codes: 0 ok, 2 input/validation error, 3 numerical failure
// (infeasible/unbounded/degenerate), 4 I/O error.

#include "raypatch/raypatch.hpp"
#include "raypatch/io/json_io.hpp"
#include "raypatch/io/lray.hpp"
#include "raypatch/io/pfm.hpp"
#include "raypatch/io/pgm.hpp"
#include "raypatch/io/ply.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using raypatch::io::json;

constexpr const char* kFormatNotes =
    "File formats:\n"
    "  calibration  JSON {fx, fy, cx, cy, width, height,\n"
    "               pose: {rotation: [9 row-major], translation: [3]}}\n"
    "               (pose maps world coordinates into the camera frame)\n"
    "  box track    JSON array of {frame, center: [x,y,z], size: [l,w,h],\n"
    "               yaw, pitch} (meters/radians, world frame)\n"
    "  depth map    PFM 'Pf', little-endian (negative scale), bottom-up rows\n"
    "  mask         PGM binary (P5), 255 = object\n"
    "  scan         .lray: magic 'LRAYSCAN' + u32 version 1 + 4 reserved\n"
    "               bytes, u64 ray count, then per ray 7 x f32 LE\n"
    "               (origin xyz, direction xyz, range; +inf = no return)\n"
    "  point cloud  PLY, float x/y/z vertices, ascii or binary LE\n"
    "  crop         JSON {x0, y0, side, target, scale}\n"
    "  scene        JSON, see `raypatch simulate --help`\n"
    "  params       JSON {alpha, beta, inlier_count, residual_rms}\n"
    "\n"
    "RAYPATCH_THREADS sets the default worker count for inpaint.\n";

void require_inputs(const std::vector<std::string>& paths) {
    for (const auto& p : paths)
        if (!std::filesystem::exists(p))
            throw raypatch::ValidationError("input file not found: " + p);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int default_threads() {
    if (const char* env = std::getenv("RAYPATCH_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

struct PipelineArgs {
    std::string calib_path, scan_path, depth_path, mask_path, boxes_path;
    std::string crop_path;
    int frame = 0;
    raypatch::InpaintOptions opt;

    void add_common(CLI::App* cmd) {
        cmd->add_option("--calib", calib_path, "calibration JSON")->required();
        cmd->add_option("--scan", scan_path, ".lray scan (object removed)")
            ->required();
        cmd->add_option("--depth", depth_path, "relative depth PFM")
            ->required();
        cmd->add_option("--mask", mask_path, "object mask PGM")->required();
        cmd->add_option("--boxes", boxes_path, "box-track JSON")->required();
        cmd->add_option("--frame", frame, "frame index in the box track");
        cmd->add_option("--crop", crop_path,
                        "crop JSON mapping the depth raster to full-frame "
                        "pixels (identity when omitted)");
        cmd->add_option("--gradient-threshold", opt.fit.gradient_threshold,
                        "depth-gradient cutoff per pixel (default: 5% of the "
                        "in-mask depth span)");
        cmd->add_option("--ransac-tol", opt.fit.ransac_tol,
                        "RANSAC inlier tolerance, meters");
        cmd->add_option("--ransac-iters", opt.fit.ransac_iterations,
                        "RANSAC iterations");
        cmd->add_option("--seed", opt.fit.seed, "RANSAC seed");
        cmd->add_option("--near", opt.fit.near_plane, "near plane, meters");
        cmd->add_flag("--invert-disparity", opt.fit.invert_disparity,
                      "inputs are raw disparity; use their reciprocal");
    }

    json options_json() const {
        return {{"gradient_threshold", opt.fit.gradient_threshold},
                {"ransac_tol", opt.fit.ransac_tol},
                {"ransac_iters", opt.fit.ransac_iterations},
                {"seed", opt.fit.seed},
                {"near", opt.fit.near_plane},
                {"invert_disparity", opt.fit.invert_disparity},
                {"frame", frame}};
    }

    struct Loaded {
        raypatch::Camera cam;
        raypatch::LidarScan scan;
        raypatch::DepthMap depth;
        raypatch::ObjectMask mask;
        raypatch::BBox3D box;
    };

    Loaded load() const {
        std::vector<std::string> paths{calib_path, scan_path, depth_path,
                                       mask_path, boxes_path};
        if (!crop_path.empty()) paths.push_back(crop_path);
        require_inputs(paths);
        Loaded in;
        in.cam = raypatch::io::load_camera(calib_path);
        in.scan = raypatch::io::load_lray(scan_path);
        in.depth = raypatch::io::load_pfm(depth_path);
        in.mask = raypatch::io::load_pgm(mask_path);
        in.box = raypatch::io::load_box_track(boxes_path).at_frame(frame);
        if (!crop_path.empty()) {
            const auto crop =
                raypatch::io::crop_from_json(raypatch::io::load_json(crop_path));
            in.depth.frame = raypatch::RasterToFrame::from_crop(crop);
        }
        return in;
    }
};

json fit_json(const raypatch::FitResult& fit) {
    return {{"ransac", raypatch::io::to_json(fit.ransac)},
            {"lp", raypatch::io::to_json(fit.lp)},
            {"refined", raypatch::io::to_json(fit.refined)},
            {"refinement", fit.lp_engaged ? "projected" : "ransac_feasible"},
            {"gradient_threshold", fit.gradient_threshold},
            {"mask_pixels", fit.mask_pixels},
            {"filtered_pixels", fit.filtered_pixels},
            {"ray_miss_pixels", fit.ray_miss_pixels},
            {"correspondences", fit.correspondences}};
}

int cmd_project(const std::string& calib_path, const std::string& boxes_path,
                int frame, double enlarge, int target, double near_plane,
                const std::string& out_mask, const std::string& out_crop) {
    require_inputs({calib_path, boxes_path});
    const auto cam = raypatch::io::load_camera(calib_path);
    const auto box = raypatch::io::load_box_track(boxes_path).at_frame(frame);
    const auto mask = raypatch::roi_mask_from_box(cam, box, enlarge, near_plane);
    const auto crop = raypatch::square_crop_for_mask(mask, target);
    if (!out_mask.empty()) raypatch::io::save_pgm(out_mask, mask);
    json result = {{"mask_pixels", mask.count()},
                   {"crop", raypatch::io::to_json(crop)},
                   {"options",
                    {{"enlarge", enlarge},
                     {"target", target},
                     {"near", near_plane},
                     {"frame", frame}}}};
    if (!out_crop.empty())
        raypatch::io::save_json(out_crop, {{"x0", crop.x0},
                                           {"y0", crop.y0},
                                           {"side", crop.side},
                                           {"target", crop.target},
                                           {"scale", crop.scale},
                                           {"options", result["options"]}});
    std::cout << result.dump(2) << "\n";
    return 0;
}

int cmd_fit(const PipelineArgs& args, const std::string& out_params) {
    const auto in = args.load();
    const auto fit = raypatch::fit_pipeline(in.cam, in.scan, in.depth, in.mask,
                                            in.box, args.opt.fit);
    json result = fit_json(fit);
    result["options"] = args.options_json();
    if (!out_params.empty()) raypatch::io::save_json(out_params, result);
    std::cout << result.dump(2) << "\n";
    return 0;
}

int cmd_inpaint(const PipelineArgs& args, const std::string& out_scan,
                const std::string& out_updates, const std::string& out_ply,
                bool ply_ascii) {
    const auto in = args.load();
    const auto res = raypatch::inpaint_pipeline(in.cam, in.scan, in.depth,
                                                in.mask, in.box, args.opt);
    if (!out_scan.empty()) raypatch::io::save_lray(out_scan, res.update.scan);
    if (!out_updates.empty()) {
        auto os = raypatch::io::open_output(out_updates,
                                            std::ios::binary);
        os << "ray_index,old_range,new_range,voxel_x,voxel_y,voxel_z\n";
        for (const auto& u : res.update.updates)
            os << u.ray_index << "," << format_double(u.old_range) << ","
               << format_double(u.new_range) << "," << u.hit_voxel[0] << ","
               << u.hit_voxel[1] << "," << u.hit_voxel[2] << "\n";
    }
    if (!out_ply.empty()) {
        std::vector<raypatch::Vec3> cloud;
        cloud.reserve(res.update.scan.rays.size());
        for (const auto& ray : res.update.scan.rays)
            if (ray.has_return()) cloud.push_back(ray.hit_point());
        raypatch::io::save_ply(out_ply, cloud,
                               ply_ascii ? raypatch::io::PlyFormat::kAscii
                                         : raypatch::io::PlyFormat::
                                               kBinaryLittleEndian);
    }
    json result = {{"fit", fit_json(res.fit)},
                   {"lifted_points", res.lifted_points},
                   {"dropped_points", res.dropped_points},
                   {"occupied_voxels", res.occupied_voxels},
                   {"updated_rays", res.update.updates.size()},
                   {"options", args.options_json()}};
    result["options"]["resolution"] = args.opt.resolution;
    result["options"]["dilation"] = args.opt.dilation_radius;
    result["options"]["voxel_center_distance"] =
        args.opt.range_mode == raypatch::RangeMode::kVoxelCenter;
    result["options"]["threads"] = args.opt.threads;
    std::cout << result.dump(2) << "\n";
    return 0;
}

int cmd_simulate(const std::string& scene_path,
                 std::optional<std::uint64_t> seed,
                 const std::string& out_dir) {
    require_inputs({scene_path});
    raypatch::SceneConfig config = raypatch::io::load_scene(scene_path);
    if (seed) config.seed = *seed;
    const raypatch::SceneBundle bundle = raypatch::make_bundle(config);

    std::filesystem::create_directories(out_dir);
    const auto path = [&](const char* name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    raypatch::io::save_json(path("calib.json"),
                            raypatch::io::to_json(bundle.camera));
    raypatch::BoxTrack track;
    track.frames.emplace_back(0, bundle.box);
    raypatch::io::save_json(path("boxes.json"), raypatch::io::to_json(track));
    raypatch::io::save_lray(path("gt.lray"), bundle.gt_scan);
    raypatch::io::save_lray(path("scan.lray"), bundle.removed_scan);
    raypatch::io::save_pfm(path("depth.pfm"), bundle.rel_depth);
    raypatch::io::save_pgm(path("mask.pgm"), bundle.mask);
    std::vector<raypatch::Vec3> gt_points;
    gt_points.reserve(bundle.object_returns.size());
    for (const auto& r : bundle.object_returns) gt_points.push_back(r.point);
    raypatch::io::save_ply(path("gt_object.ply"), gt_points);

    json truth = {{"alpha", bundle.true_alpha},
                  {"beta", bundle.true_beta},
                  {"object_ray_ids", bundle.object_ray_ids},
                  {"object_return_count", bundle.object_returns.size()},
                  {"scene", raypatch::io::to_json(config)}};
    raypatch::io::save_json(path("truth.json"), truth);

    json result = {{"out_dir", out_dir},
                   {"rays", bundle.gt_scan.rays.size()},
                   {"object_rays", bundle.object_ray_ids.size()},
                   {"mask_pixels", bundle.mask.count()},
                   {"options", {{"seed", config.seed}}}};
    std::cout << result.dump(2) << "\n";
    return 0;
}

int cmd_evaluate(const std::string& gt_path, const std::string& rec_path,
                 const std::string& boxes_path, int frame,
                 const std::string& denom, const std::string& out_report,
                 const std::string& out_csv) {
    require_inputs({gt_path, rec_path, boxes_path});
    const auto gt = raypatch::io::load_lray(gt_path);
    const auto rec = raypatch::io::load_lray(rec_path);
    const auto box = raypatch::io::load_box_track(boxes_path).at_frame(frame);
    const auto d = denom == "gt"
                       ? raypatch::AbsRelDenominator::kGroundTruth
                       : raypatch::AbsRelDenominator::kReconstructed;
    const auto report = raypatch::evaluate_scans(gt, rec, box, d);
    json result = raypatch::io::to_json(report);
    result["options"] = {{"absrel_denominator", denom}, {"frame", frame}};
    if (!out_report.empty()) raypatch::io::save_json(out_report, result);
    if (!out_csv.empty()) {
        auto os = raypatch::io::open_output(out_csv, std::ios::binary);
        os << raypatch::io::kEvalCsvHeader << "\n"
           << raypatch::io::eval_csv_row(report) << "\n";
    }
    std::cout << result.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometry-based LiDAR inpainting toolkit"};
    app.footer(kFormatNotes);
    app.require_subcommand(1);

    // project
    std::string pr_calib, pr_boxes, pr_out_mask, pr_out_crop;
    int pr_frame = 0, pr_target = 512;
    double pr_enlarge = 0.10, pr_near = raypatch::kDefaultNearPlane;
    auto* project = app.add_subcommand(
        "project", "Project a 3D box into an RoI mask and square crop");
    project->add_option("--calib", pr_calib, "calibration JSON")->required();
    project->add_option("--boxes", pr_boxes, "box-track JSON")->required();
    project->add_option("--frame", pr_frame, "frame index");
    project->add_option("--enlarge", pr_enlarge,
                        "hull enlargement fraction (default 0.10)");
    project->add_option("--target", pr_target,
                        "square crop target resolution (default 512)");
    project->add_option("--near", pr_near, "near plane, meters");
    project->add_option("--out-mask", pr_out_mask, "output mask PGM");
    project->add_option("--out-crop", pr_out_crop, "output crop JSON");

    // fit
    PipelineArgs fit_args;
    std::string fit_out;
    auto* fit = app.add_subcommand(
        "fit", "Estimate the relative->metric depth map (RANSAC + scale LP)");
    fit_args.add_common(fit);
    fit->add_option("--out", fit_out, "output params JSON");

    // inpaint
    PipelineArgs inp_args;
    std::string inp_out_scan, inp_out_updates, inp_out_ply;
    bool inp_ply_ascii = false, inp_voxel_center = false;
    int inp_resolution = 64;
    inp_args.opt.threads = default_threads();
    auto* inpaint = app.add_subcommand(
        "inpaint", "Rewrite LiDAR ranges to match the inserted object");
    inp_args.add_common(inpaint);
    inpaint->add_option("--resolution", inp_resolution,
                        "voxel grid resolution per axis (default 64)");
    inpaint->add_option("--dilation", inp_args.opt.dilation_radius,
                        "occupancy dilation radius, voxels");
    inpaint->add_flag("--voxel-center-distance", inp_voxel_center,
                      "update ranges to voxel centers instead of entry "
                      "distances");
    inpaint->add_option("--threads", inp_args.opt.threads,
                        "worker threads (default $RAYPATCH_THREADS or 1)");
    inpaint->add_option("--out-scan", inp_out_scan, "updated .lray");
    inpaint->add_option("--out-updates", inp_out_updates, "ray-update CSV");
    inpaint->add_option("--out-ply", inp_out_ply, "updated point cloud PLY");
    inpaint->add_flag("--ply-ascii", inp_ply_ascii, "write ascii PLY");

    // simulate
    std::string sim_scene, sim_out_dir = ".";
    std::optional<std::uint64_t> sim_seed;
    auto* simulate = app.add_subcommand(
        "simulate", "Generate a synthetic ground-truth scene bundle");
    simulate->footer(
        "Scene JSON keys: camera (calibration schema); scanner\n"
        "{azimuth_count, elevation_count, azimuth_min, azimuth_max,\n"
        "elevation_min, elevation_max, max_range, pose}; background (array\n"
        "of primitives); object {primitive, box}; alpha, beta (true affine\n"
        "map); noise_sigma, outlier_fraction, mask_to_hull,\n"
        "depth_to_constant, hull_enlarge_pct (degradations); camera_stride\n"
        "(> 0 casts beams through every stride-th pixel center instead of\n"
        "the spinning scanner); seed.\n"
        "Primitives: {kind: sphere|cuboid|superellipsoid, pose, radius |\n"
        "half_extents | radii + exponents}. See scenes/demo_scene.json.\n"
        "Outputs: calib.json, boxes.json, gt.lray, scan.lray (object\n"
        "removed), depth.pfm (relative), mask.pgm, gt_object.ply,\n"
        "truth.json.");
    simulate->add_option("--scene", sim_scene, "scene config JSON")->required();
    simulate->add_option("--seed", sim_seed, "override the scene seed");
    simulate->add_option("--out-dir", sim_out_dir, "output directory");

    // evaluate
    std::string ev_gt, ev_rec, ev_boxes, ev_denom = "rec", ev_out, ev_csv;
    int ev_frame = 0;
    auto* evaluate = app.add_subcommand(
        "evaluate", "Compare a reconstructed scan against ground truth");
    evaluate->add_option("--gt", ev_gt, "ground-truth .lray")->required();
    evaluate->add_option("--rec", ev_rec, "reconstructed .lray")->required();
    evaluate->add_option("--boxes", ev_boxes, "box-track JSON")->required();
    evaluate->add_option("--frame", ev_frame, "frame index");
    evaluate->add_option("--absrel-denominator", ev_denom,
                         "absrel denominator: rec (reported) or gt")
        ->check(CLI::IsMember({"rec", "gt"}));
    evaluate->add_option("--out", ev_out, "output report JSON");
    evaluate->add_option("--csv", ev_csv, "output CSV row");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*project)
            return cmd_project(pr_calib, pr_boxes, pr_frame, pr_enlarge,
                               pr_target, pr_near, pr_out_mask, pr_out_crop);
        if (*fit) return cmd_fit(fit_args, fit_out);
        if (*inpaint) {
            inp_args.opt.resolution = {inp_resolution, inp_resolution,
                                       inp_resolution};
            inp_args.opt.range_mode =
                inp_voxel_center ? raypatch::RangeMode::kVoxelCenter
                                 : raypatch::RangeMode::kVoxelEntry;
            return cmd_inpaint(inp_args, inp_out_scan, inp_out_updates,
                               inp_out_ply, inp_ply_ascii);
        }
        if (*simulate) return cmd_simulate(sim_scene, sim_seed, sim_out_dir);
        if (*evaluate)
            return cmd_evaluate(ev_gt, ev_rec, ev_boxes, ev_frame, ev_denom,
                                ev_out, ev_csv);
    } catch (const raypatch::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const raypatch::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const raypatch::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
