#pragma once

#include "raypatch/box.hpp"
#include "raypatch/bundle.hpp"
#include "raypatch/camera.hpp"
#include "raypatch/errors.hpp"
#include "raypatch/math.hpp"
#include "raypatch/metrics.hpp"
#include "raypatch/ransac.hpp"
#include "raypatch/raster.hpp"
#include "raypatch/sim.hpp"

#include <json.hpp>

#include <fstream>
#include <string>
#include <vector>

namespace raypatch::io {

using nlohmann::json;

inline json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw IoError("bad json in " + path + ": " + e.what());
    }
}

inline void save_json(const std::string& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path);
    os << j.dump(2) << "\n";
    if (!os) throw IoError("write failed for " + path);
}

// ---- rigid transforms ----

inline json to_json(const RigidTransform& t) {
    std::vector<double> rot(9);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rot[3 * r + c] = t.rotation(r, c);
    return {{"rotation", rot},
            {"translation", {t.translation.x(), t.translation.y(),
                             t.translation.z()}}};
}

inline RigidTransform rigid_from_json(const json& j) {
    try {
        RigidTransform t;
        const auto rot = j.at("rotation").get<std::vector<double>>();
        const auto tr = j.at("translation").get<std::vector<double>>();
        if (rot.size() != 9 || tr.size() != 3)
            throw IoError("pose: rotation needs 9 numbers, translation 3");
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) t.rotation(r, c) = rot[3 * r + c];
        t.translation = Vec3(tr[0], tr[1], tr[2]);
        if (!t.is_rigid())
            throw ValidationError("pose: rotation is not orthonormal");
        return t;
    } catch (const json::exception& e) {
        throw IoError(std::string("pose: ") + e.what());
    }
}

// ---- calibration ----

inline json to_json(const Camera& cam) {
    return {{"fx", cam.fx},         {"fy", cam.fy},
            {"cx", cam.cx},         {"cy", cam.cy},
            {"width", cam.width},   {"height", cam.height},
            {"pose", to_json(cam.pose)}};
}

inline Camera camera_from_json(const json& j) {
    try {
        Camera cam;
        cam.fx = j.at("fx").get<double>();
        cam.fy = j.at("fy").get<double>();
        cam.cx = j.at("cx").get<double>();
        cam.cy = j.at("cy").get<double>();
        cam.width = j.at("width").get<int>();
        cam.height = j.at("height").get<int>();
        if (j.contains("pose")) cam.pose = rigid_from_json(j.at("pose"));
        cam.validate();
        return cam;
    } catch (const json::exception& e) {
        throw IoError(std::string("calibration: ") + e.what());
    }
}

inline Camera load_camera(const std::string& path) {
    return camera_from_json(load_json(path));
}

// ---- box tracks ----

inline json to_json(const BBox3D& b) {
    return {{"center", {b.center.x(), b.center.y(), b.center.z()}},
            {"size", {b.size.x(), b.size.y(), b.size.z()}},
            {"yaw", b.yaw},
            {"pitch", b.pitch}};
}

inline BBox3D box_from_json(const json& j) {
    try {
        BBox3D b;
        const auto c = j.at("center").get<std::vector<double>>();
        const auto s = j.at("size").get<std::vector<double>>();
        if (c.size() != 3 || s.size() != 3)
            throw IoError("box: center and size need 3 numbers");
        b.center = Vec3(c[0], c[1], c[2]);
        b.size = Vec3(s[0], s[1], s[2]);
        b.yaw = j.value("yaw", 0.0);
        b.pitch = j.value("pitch", 0.0);
        b.validate();
        return b;
    } catch (const json::exception& e) {
        throw IoError(std::string("box: ") + e.what());
    }
}

inline json to_json(const BoxTrack& track) {
    json arr = json::array();
    for (const auto& [frame, box] : track.frames) {
        json j = to_json(box);
        j["frame"] = frame;
        arr.push_back(j);
    }
    return arr;
}

inline BoxTrack box_track_from_json(const json& j) {
    if (!j.is_array()) throw IoError("box track: expected an array");
    BoxTrack track;
    for (const auto& entry : j) {
        const int frame = entry.value("frame", 0);
        track.frames.emplace_back(frame, box_from_json(entry));
    }
    track.validate();
    return track;
}

inline BoxTrack load_box_track(const std::string& path) {
    return box_track_from_json(load_json(path));
}

// ---- fitted parameters ----

inline json to_json(const AffineDepthParams& p) {
    return {{"alpha", p.alpha},
            {"beta", p.beta},
            {"inlier_count", p.inlier_count},
            {"residual_rms", p.residual_rms}};
}

inline AffineDepthParams params_from_json(const json& j) {
    try {
        AffineDepthParams p;
        p.alpha = j.at("alpha").get<double>();
        p.beta = j.at("beta").get<double>();
        p.inlier_count = j.value("inlier_count", std::size_t{0});
        p.residual_rms = j.value("residual_rms", 0.0);
        if (!(p.alpha > 0)) throw ValidationError("params: alpha must be > 0");
        return p;
    } catch (const json::exception& e) {
        throw IoError(std::string("params: ") + e.what());
    }
}

// ---- crops ----

inline json to_json(const SquareCrop& c) {
    return {{"x0", c.x0},         {"y0", c.y0},   {"side", c.side},
            {"target", c.target}, {"scale", c.scale}};
}

inline SquareCrop crop_from_json(const json& j) {
    try {
        SquareCrop c;
        c.x0 = j.at("x0").get<int>();
        c.y0 = j.at("y0").get<int>();
        c.side = j.at("side").get<int>();
        c.target = j.at("target").get<int>();
        c.scale = j.at("scale").get<double>();
        return c;
    } catch (const json::exception& e) {
        throw IoError(std::string("crop: ") + e.what());
    }
}

// ---- primitives and scenes ----

inline json to_json(const Primitive& p) {
    json j;
    switch (p.kind) {
        case Primitive::Kind::kSphere:
            j["kind"] = "sphere";
            j["radius"] = p.radii.x();
            break;
        case Primitive::Kind::kCuboid:
            j["kind"] = "cuboid";
            j["half_extents"] = {p.radii.x(), p.radii.y(), p.radii.z()};
            break;
        case Primitive::Kind::kSuperellipsoid:
            j["kind"] = "superellipsoid";
            j["radii"] = {p.radii.x(), p.radii.y(), p.radii.z()};
            j["exponents"] = {p.exponents.x(), p.exponents.y()};
            break;
    }
    j["pose"] = to_json(p.pose);
    return j;
}

inline Primitive primitive_from_json(const json& j) {
    try {
        Primitive p;
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "sphere") {
            p.kind = Primitive::Kind::kSphere;
            const double r = j.at("radius").get<double>();
            p.radii = Vec3(r, r, r);
        } else if (kind == "cuboid") {
            p.kind = Primitive::Kind::kCuboid;
            const auto he = j.at("half_extents").get<std::vector<double>>();
            if (he.size() != 3) throw IoError("cuboid: need 3 half extents");
            p.radii = Vec3(he[0], he[1], he[2]);
        } else if (kind == "superellipsoid") {
            p.kind = Primitive::Kind::kSuperellipsoid;
            const auto r = j.at("radii").get<std::vector<double>>();
            const auto e = j.at("exponents").get<std::vector<double>>();
            if (r.size() != 3 || e.size() != 2)
                throw IoError("superellipsoid: need 3 radii and 2 exponents");
            p.radii = Vec3(r[0], r[1], r[2]);
            p.exponents = Vec2(e[0], e[1]);
        } else {
            throw IoError("primitive: unknown kind '" + kind + "'");
        }
        if (j.contains("pose")) p.pose = rigid_from_json(j.at("pose"));
        p.validate();
        return p;
    } catch (const json::exception& e) {
        throw IoError(std::string("primitive: ") + e.what());
    }
}

inline json to_json(const ScannerSpec& s) {
    return {{"azimuth_count", s.azimuth_count},
            {"elevation_count", s.elevation_count},
            {"azimuth_min", s.azimuth_min},
            {"azimuth_max", s.azimuth_max},
            {"elevation_min", s.elevation_min},
            {"elevation_max", s.elevation_max},
            {"max_range", s.max_range},
            {"pose", to_json(s.pose)}};
}

inline ScannerSpec scanner_from_json(const json& j) {
    try {
        ScannerSpec s;
        s.azimuth_count = j.at("azimuth_count").get<int>();
        s.elevation_count = j.at("elevation_count").get<int>();
        s.azimuth_min = j.at("azimuth_min").get<double>();
        s.azimuth_max = j.at("azimuth_max").get<double>();
        s.elevation_min = j.at("elevation_min").get<double>();
        s.elevation_max = j.at("elevation_max").get<double>();
        s.max_range = j.at("max_range").get<double>();
        if (j.contains("pose")) s.pose = rigid_from_json(j.at("pose"));
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw IoError(std::string("scanner: ") + e.what());
    }
}

inline json to_json(const SceneConfig& c) {
    json bg = json::array();
    for (const auto& p : c.background) bg.push_back(to_json(p));
    return {{"camera", to_json(c.camera)},
            {"scanner", to_json(c.scanner)},
            {"background", bg},
            {"object", {{"primitive", to_json(c.object)},
                        {"box", to_json(c.box)}}},
            {"alpha", c.alpha},
            {"beta", c.beta},
            {"noise_sigma", c.noise_sigma},
            {"outlier_fraction", c.outlier_fraction},
            {"mask_to_hull", c.mask_to_hull},
            {"depth_to_constant", c.depth_to_constant},
            {"hull_enlarge_pct", c.hull_enlarge_pct},
            {"camera_stride", c.camera_stride},
            {"seed", c.seed}};
}

inline SceneConfig scene_from_json(const json& j) {
    try {
        SceneConfig c;
        c.camera = camera_from_json(j.at("camera"));
        c.scanner = scanner_from_json(j.at("scanner"));
        for (const auto& p : j.value("background", json::array()))
            c.background.push_back(primitive_from_json(p));
        c.object = primitive_from_json(j.at("object").at("primitive"));
        c.box = box_from_json(j.at("object").at("box"));
        c.alpha = j.at("alpha").get<double>();
        c.beta = j.at("beta").get<double>();
        c.noise_sigma = j.value("noise_sigma", 0.0);
        c.outlier_fraction = j.value("outlier_fraction", 0.0);
        c.mask_to_hull = j.value("mask_to_hull", false);
        c.depth_to_constant = j.value("depth_to_constant", false);
        c.hull_enlarge_pct = j.value("hull_enlarge_pct", 0.0);
        c.camera_stride = j.value("camera_stride", 0);
        c.seed = j.value("seed", std::uint64_t{1});
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw IoError(std::string("scene: ") + e.what());
    }
}

inline SceneConfig load_scene(const std::string& path) {
    return scene_from_json(load_json(path));
}

// ---- evaluation reports ----

inline json to_json(const EvalReport& r) {
    return {{"absrel_object", r.absrel_object},
            {"absrel_all", r.absrel_all},
            {"l2_object", r.l2_object},
            {"l2_all", r.l2_all},
            {"matched_object", r.matched_object},
            {"matched_all", r.matched_all},
            {"missed_gt_only", r.missed_gt_only},
            {"missed_rec_only", r.missed_rec_only},
            {"denominator",
             r.denominator == AbsRelDenominator::kReconstructed
                 ? "reconstructed"
                 : "ground_truth"}};
}

/// One CSV row per report, with a fixed header.
inline constexpr const char* kEvalCsvHeader =
    "absrel_object,absrel_all,l2_object,l2_all,matched_object,matched_all,"
    "missed_gt_only,missed_rec_only";

inline std::string eval_csv_row(const EvalReport& r) {
    json vals = {r.absrel_object, r.absrel_all,  r.l2_object,
                 r.l2_all,        r.matched_object, r.matched_all,
                 r.missed_gt_only, r.missed_rec_only};
    std::string row;
    for (const auto& v : vals) {
        if (!row.empty()) row.push_back(',');
        row += v.dump();
    }
    return row;
}

}  // namespace raypatch::io
