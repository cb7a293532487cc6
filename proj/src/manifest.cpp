#include "rfcd/manifest.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace rfcd {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

json vec_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw std::runtime_error("expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json mat_to_json(const Mat3& m) {
    json a = json::array();
    for (double v : m.m) a.push_back(v);
    return a;
}

Mat3 mat_from_json(const json& j) {
    if (!j.is_array() || j.size() != 9) throw std::runtime_error("expected 9 row-major floats");
    Mat3 m;
    for (int i = 0; i < 9; ++i) m.m[i] = j[i].get<double>();
    return m;
}

ordered_json camera_to_obj(const Camera& c) {
    ordered_json o;
    o["width"] = c.width;
    o["height"] = c.height;
    o["fx"] = c.fx;
    o["fy"] = c.fy;
    o["cx"] = c.cx;
    o["cy"] = c.cy;
    o["rotation"] = mat_to_json(c.pose.rotation);
    o["translation"] = vec_to_json(c.pose.translation);
    o["near"] = c.near;
    o["far"] = c.far;
    return o;
}

Camera camera_from_obj(const json& o) {
    Camera c;
    c.width = o.at("width").get<int>();
    c.height = o.at("height").get<int>();
    c.fx = o.at("fx").get<double>();
    c.fy = o.at("fy").get<double>();
    c.cx = o.at("cx").get<double>();
    c.cy = o.at("cy").get<double>();
    c.pose.rotation = mat_from_json(o.at("rotation"));
    c.pose.translation = vec_from_json(o.at("translation"));
    c.near = o.at("near").get<double>();
    c.far = o.at("far").get<double>();
    c.validate();
    return c;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text << "\n";
    if (!out) throw std::runtime_error("short write: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

std::string to_json(const Camera& camera) { return camera_to_obj(camera).dump(2); }

Camera camera_from_json(const std::string& text) { return camera_from_obj(json::parse(text)); }

void write_pose_manifest(const std::vector<PoseEntry>& entries, const std::string& path) {
    ordered_json root;
    root["views"] = json::array();
    for (const auto& e : entries) {
        ordered_json o = camera_to_obj(e.camera);
        o["image"] = e.image;
        root["views"].push_back(o);
    }
    write_text(path, root.dump(2));
}

std::vector<PoseEntry> read_pose_manifest(const std::string& path) {
    json root = json::parse(read_text(path));
    std::vector<PoseEntry> entries;
    for (const auto& o : root.at("views")) {
        PoseEntry e;
        e.image = o.value("image", "");
        e.camera = camera_from_obj(o);
        entries.push_back(std::move(e));
    }
    return entries;
}

std::string scene_to_json(const SceneSpec& scene) {
    ordered_json root;
    root["background_density"] = scene.background_density;
    root["bounds"] = {{"min", vec_to_json(scene.bounds.min)}, {"max", vec_to_json(scene.bounds.max)}};
    root["primitives"] = json::array();
    for (const auto& p : scene.primitives) {
        ordered_json o;
        o["id"] = p.id;
        o["shape"] = p.shape == Primitive::Shape::Box ? "box" : "sphere";
        o["center"] = vec_to_json(p.center);
        if (p.shape == Primitive::Shape::Box)
            o["half_extents"] = vec_to_json(p.half_extents);
        else
            o["radius"] = p.radius;
        o["color"] = vec_to_json(p.color);
        o["density"] = p.density;
        if (p.checker) {
            o["checker_color"] = vec_to_json(p.checker_color);
            o["checker_cell"] = p.checker_cell;
        }
        root["primitives"].push_back(o);
    }
    return root.dump(2);
}

SceneSpec scene_from_json(const std::string& text) {
    json root = json::parse(text);
    SceneSpec scene;
    scene.background_density = root.value("background_density", 0.0);
    if (root.contains("bounds")) {
        scene.bounds.min = vec_from_json(root["bounds"].at("min"));
        scene.bounds.max = vec_from_json(root["bounds"].at("max"));
    }
    for (const auto& o : root.value("primitives", json::array())) {
        Primitive p;
        p.id = o.at("id").get<std::string>();
        std::string shape = o.value("shape", "box");
        if (shape == "box") {
            p.shape = Primitive::Shape::Box;
            p.half_extents = vec_from_json(o.at("half_extents"));
        } else if (shape == "sphere") {
            p.shape = Primitive::Shape::Sphere;
            p.radius = o.at("radius").get<double>();
        } else {
            throw std::runtime_error("unknown primitive shape: " + shape);
        }
        p.center = vec_from_json(o.at("center"));
        p.color = vec_from_json(o.at("color"));
        p.density = o.at("density").get<double>();
        if (o.contains("checker_color")) {
            p.checker = true;
            p.checker_color = vec_from_json(o["checker_color"]);
            p.checker_cell = o.value("checker_cell", 0.0);
        }
        scene.primitives.push_back(std::move(p));
    }
    scene.validate();
    return scene;
}

void write_scene(const SceneSpec& scene, const std::string& path) {
    write_text(path, scene_to_json(scene));
}

SceneSpec read_scene(const std::string& path) { return scene_from_json(read_text(path)); }

std::string trajectory_to_json(const TrajectorySpec& spec) {
    ordered_json o;
    o["mode"] = spec.mode == TrajectorySpec::Mode::Surround ? "surround" : "forward_facing";
    o["center"] = vec_to_json(spec.center);
    o["per_circle"] = spec.per_circle;
    o["radius"] = spec.radius;
    o["circle_heights"] = {spec.circle_heights[0], spec.circle_heights[1], spec.circle_heights[2]};
    o["count"] = spec.count;
    o["standoff"] = spec.standoff;
    o["plane_half_width"] = spec.plane_half_width;
    o["plane_half_height"] = spec.plane_half_height;
    o["plane_z_offset"] = spec.plane_z_offset;
    o["jitter"] = spec.jitter;
    o["seed"] = spec.seed;
    o["image_width"] = spec.image_width;
    o["image_height"] = spec.image_height;
    o["focal_px"] = spec.focal_px;
    o["near"] = spec.near;
    o["far"] = spec.far;
    return o.dump(2);
}

TrajectorySpec trajectory_from_json(const std::string& text) {
    json o = json::parse(text);
    TrajectorySpec spec;
    std::string mode = o.value("mode", "surround");
    if (mode == "surround")
        spec.mode = TrajectorySpec::Mode::Surround;
    else if (mode == "forward_facing")
        spec.mode = TrajectorySpec::Mode::ForwardFacing;
    else
        throw std::runtime_error("unknown trajectory mode: " + mode);
    if (o.contains("center")) spec.center = vec_from_json(o["center"]);
    spec.per_circle = o.value("per_circle", spec.per_circle);
    spec.radius = o.value("radius", spec.radius);
    if (o.contains("circle_heights")) {
        const auto& h = o["circle_heights"];
        for (int i = 0; i < 3; ++i) spec.circle_heights[i] = h.at(i).get<double>();
    }
    spec.count = o.value("count", spec.count);
    spec.standoff = o.value("standoff", spec.standoff);
    spec.plane_half_width = o.value("plane_half_width", spec.plane_half_width);
    spec.plane_half_height = o.value("plane_half_height", spec.plane_half_height);
    spec.plane_z_offset = o.value("plane_z_offset", spec.plane_z_offset);
    spec.jitter = o.value("jitter", spec.jitter);
    spec.seed = o.value("seed", spec.seed);
    spec.image_width = o.value("image_width", spec.image_width);
    spec.image_height = o.value("image_height", spec.image_height);
    spec.focal_px = o.value("focal_px", spec.focal_px);
    spec.near = o.value("near", spec.near);
    spec.far = o.value("far", spec.far);
    return spec;
}

std::string transform_to_json(const SimilarityTransform& t) {
    ordered_json o;
    o["scale"] = t.scale;
    o["rotation"] = mat_to_json(t.rotation);
    o["translation"] = vec_to_json(t.translation);
    return o.dump(2);
}

SimilarityTransform transform_from_json(const std::string& text) {
    json o = json::parse(text);
    SimilarityTransform t;
    t.scale = o.at("scale").get<double>();
    t.rotation = mat_from_json(o.at("rotation"));
    t.translation = vec_from_json(o.at("translation"));
    t.validate();
    return t;
}

void write_transform(const SimilarityTransform& t, const std::string& path) {
    write_text(path, transform_to_json(t));
}

SimilarityTransform read_transform(const std::string& path) {
    return transform_from_json(read_text(path));
}

namespace {

ordered_json pixel_metrics_to_obj(const PixelMetrics& m) {
    ordered_json o;
    o["tp"] = m.tp;
    o["fp"] = m.fp;
    o["fn"] = m.fn;
    o["precision"] = m.precision;
    o["recall"] = m.recall;
    o["f1"] = m.f1;
    o["iou"] = m.iou;
    return o;
}

PixelMetrics pixel_metrics_from_obj(const json& o) {
    PixelMetrics m;
    m.tp = o.at("tp").get<std::uint64_t>();
    m.fp = o.at("fp").get<std::uint64_t>();
    m.fn = o.at("fn").get<std::uint64_t>();
    m.precision = o.at("precision").get<double>();
    m.recall = o.at("recall").get<double>();
    m.f1 = o.at("f1").get<double>();
    m.iou = o.at("iou").get<double>();
    return m;
}

}  // namespace

void write_metrics_report(const MetricsReport& report, const std::string& path) {
    ordered_json root;
    root["per_view"] = json::array();
    for (const auto& r : report.per_view) {
        ordered_json o;
        o["view"] = r.view;
        o["pixels"] = pixel_metrics_to_obj(r.pixels);
        if (r.map >= 0) o["map"] = r.map;
        root["per_view"].push_back(o);
    }
    root["aggregate"] = pixel_metrics_to_obj(report.aggregate);
    root["mean_f1"] = report.mean_f1;
    root["mean_iou"] = report.mean_iou;
    if (report.mean_map >= 0) root["mean_map"] = report.mean_map;
    write_text(path, root.dump(2));
}

MetricsReport read_metrics_report(const std::string& path) {
    json root = json::parse(read_text(path));
    MetricsReport report;
    for (const auto& o : root.at("per_view")) {
        MetricsRecord r;
        r.view = o.at("view").get<std::string>();
        r.pixels = pixel_metrics_from_obj(o.at("pixels"));
        r.map = o.value("map", -1.0);
        report.per_view.push_back(std::move(r));
    }
    report.aggregate = pixel_metrics_from_obj(root.at("aggregate"));
    report.mean_f1 = root.at("mean_f1").get<double>();
    report.mean_iou = root.at("mean_iou").get<double>();
    report.mean_map = root.value("mean_map", -1.0);
    return report;
}

}  // namespace rfcd
