#include "rfcd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "rfcd/ground_truth.hpp"
#include "rfcd/volume_render.hpp"

namespace rfcd {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ChangeRenderConfig PipelineConfig::render_config() const {
    ChangeRenderConfig rc;
    rc.thresholds = thresholds;
    rc.mode = trajectory.mode == TrajectorySpec::Mode::Surround ? SceneMode::Surround
                                                                : SceneMode::ForwardFacing;
    rc.views = views_per_point;
    auto [lat, vert] = trajectory_cone_half_angles(trajectory);
    rc.cone = ViewCone{lat, vert};
    rc.window_count = window_count;
    rc.window_half_width_factor = window_half_width_factor;
    rc.samples_per_ray = samples_per_ray;
    return rc;
}

void PipelineConfig::validate() const {
    if (backend != "oracle" && backend != "voxel")
        throw ConfigError("backend must be 'oracle' or 'voxel', got '" + backend + "'");
    if (!has_inline_scenes) {
        try {
            rfcd::scene_preset(scene_preset);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    thresholds.validate();
    if (views_per_point < 1) throw ConfigError("views_per_point must be >= 1");
    if (window_count < 1) throw ConfigError("window.count must be >= 1");
    if (!(window_half_width_factor > 0)) throw ConfigError("window.half_width_factor must be > 0");
    if (samples_per_ray < 1) throw ConfigError("samples_per_ray must be >= 1");
    if (holdout_stride < 2) throw ConfigError("holdout_stride must be >= 2");
    try {
        train.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::string pipeline_config_to_json(const PipelineConfig& c) {
    ordered_json o;
    if (c.has_inline_scenes) {
        o["scene_pre"] = json::parse(scene_to_json(c.scene_pre));
        o["scene_post"] = json::parse(scene_to_json(c.scene_post));
    } else {
        o["scene_preset"] = c.scene_preset;
    }
    o["trajectory"] = json::parse(trajectory_to_json(c.trajectory));
    o["backend"] = c.backend;
    o["train"] = {{"iterations", c.train.iterations},
                  {"learning_rate", c.train.learning_rate},
                  {"rays_per_batch", c.train.rays_per_batch},
                  {"samples_per_ray", c.train.samples_per_ray},
                  {"seed", c.train.seed},
                  {"density_reg", c.train.density_reg}};
    o["holdout_stride"] = c.holdout_stride;
    o["thresholds"] = {{"eps_c", c.thresholds.eps_c}, {"eps_sigma", c.thresholds.eps_sigma}};
    o["views_per_point"] = c.views_per_point;
    o["window"] = {{"count", c.window_count}, {"half_width_factor", c.window_half_width_factor}};
    o["samples_per_ray"] = c.samples_per_ray;
    o["seed"] = c.seed;
    if (!c.novel_views.empty()) {
        ordered_json novel = ordered_json::array();
        for (const Camera& cam : c.novel_views) novel.push_back(ordered_json::parse(to_json(cam)));
        o["novel_views"] = std::move(novel);
    }
    return o.dump(2);
}

PipelineConfig pipeline_config_from_json(const std::string& text) {
    json o;
    try {
        o = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    PipelineConfig c;
    try {
        if (o.contains("scene_pre") || o.contains("scene_post")) {
            c.has_inline_scenes = true;
            c.scene_pre = scene_from_json(o.at("scene_pre").dump());
            c.scene_post = scene_from_json(o.at("scene_post").dump());
        } else {
            c.scene_preset = o.value("scene_preset", c.scene_preset);
        }
        if (o.contains("trajectory")) c.trajectory = trajectory_from_json(o["trajectory"].dump());
        c.backend = o.value("backend", c.backend);
        if (o.contains("train")) {
            const json& t = o["train"];
            c.train.iterations = t.value("iterations", c.train.iterations);
            c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
            c.train.rays_per_batch = t.value("rays_per_batch", c.train.rays_per_batch);
            c.train.samples_per_ray = t.value("samples_per_ray", c.train.samples_per_ray);
            c.train.seed = t.value("seed", c.train.seed);
            c.train.density_reg = t.value("density_reg", c.train.density_reg);
        }
        c.holdout_stride = o.value("holdout_stride", c.holdout_stride);
        if (o.contains("thresholds")) {
            c.thresholds.eps_c = o["thresholds"].value("eps_c", c.thresholds.eps_c);
            c.thresholds.eps_sigma = o["thresholds"].value("eps_sigma", c.thresholds.eps_sigma);
        }
        c.views_per_point = o.value("views_per_point", c.views_per_point);
        if (o.contains("window")) {
            c.window_count = o["window"].value("count", c.window_count);
            c.window_half_width_factor =
                o["window"].value("half_width_factor", c.window_half_width_factor);
        }
        c.samples_per_ray = o.value("samples_per_ray", c.samples_per_ray);
        c.seed = o.value("seed", c.seed);
        for (const auto& v : o.value("novel_views", json::array()))
            c.novel_views.push_back(camera_from_json(v.dump()));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    c.validate();
    return c;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);
    std::string text(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>{});
    return pipeline_config_from_json(text);
}

std::pair<SceneSpec, SceneSpec> resolve_scene_pair(const PipelineConfig& config) {
    if (config.has_inline_scenes) return {config.scene_pre, config.scene_post};
    try {
        ScenePairPreset preset = scene_preset(config.scene_preset);
        return {preset.pre, preset.post};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

namespace {

std::string view_name(const std::string& stem, size_t index, const std::string& ext) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%04zu.%s", stem.c_str(), index, ext.c_str());
    return buf;
}

void write_config_snapshot(const PipelineConfig& config, const fs::path& dir) {
    std::ofstream out(dir / "config.json");
    out << pipeline_config_to_json(config) << "\n";
}

struct Capture {
    std::vector<Image> images;
    std::vector<Camera> cameras;
};

Capture load_capture(const fs::path& side_dir) {
    fs::path manifest = side_dir / "poses.json";
    if (!fs::exists(manifest)) throw DataError("missing pose manifest: " + manifest.string());
    Capture cap;
    for (const PoseEntry& e : read_pose_manifest(manifest.string())) {
        cap.cameras.push_back(e.camera);
        fs::path img = side_dir / e.image;
        if (!fs::exists(img)) throw DataError("missing image: " + img.string());
        cap.images.push_back(read_ppm(img.string()));
    }
    if (cap.images.empty()) throw DataError("empty capture in " + side_dir.string());
    return cap;
}

}  // namespace

void cmd_generate(const PipelineConfig& config, const std::string& out_dir) {
    config.validate();
    auto [scene_pre, scene_post] = resolve_scene_pair(config);
    std::vector<Camera> cameras = make_trajectory(config.trajectory);

    fs::create_directories(fs::path(out_dir) / "pre" / "images");
    fs::create_directories(fs::path(out_dir) / "post" / "images");
    fs::create_directories(fs::path(out_dir) / "masks");

    AnalyticField field_pre(scene_pre);
    AnalyticField field_post(scene_post);

    std::vector<PoseEntry> manifest;
    for (size_t i = 0; i < cameras.size(); ++i)
        manifest.push_back({"images/" + view_name("view", i, "ppm"), cameras[i]});

    for (const char* side : {"pre", "post"}) {
        const AnalyticField& field = std::string(side) == "pre" ? field_pre : field_post;
        fs::path base = fs::path(out_dir) / side;
        for (size_t i = 0; i < cameras.size(); ++i) {
            Image img = render_image(field, cameras[i], config.samples_per_ray);
            write_ppm(img, (base / manifest[i].image).string());
        }
        write_pose_manifest(manifest, (base / "poses.json").string());
    }

    for (size_t i = 0; i < cameras.size(); ++i) {
        ChangeMap gt =
            ground_truth_change_mask(scene_pre, scene_post, cameras[i], config.samples_per_ray);
        write_mask(gt, (fs::path(out_dir) / "masks" / view_name("mask", i, "pgm")).string());
    }

    write_scene(scene_pre, (fs::path(out_dir) / "scene_pre.json").string());
    write_scene(scene_post, (fs::path(out_dir) / "scene_post.json").string());
    write_config_snapshot(config, out_dir);
}

namespace {

/// Trains one capture side and reports held-out PSNR; holdout views are the
/// every-Nth poses, excluded from the ray pool.
std::pair<VoxelGridField, ordered_json> train_side(const PipelineConfig& config,
                                                   const Capture& capture) {
    std::vector<Image> train_images;
    std::vector<Camera> train_cameras;
    std::vector<size_t> holdout;
    for (size_t i = 0; i < capture.images.size(); ++i) {
        if (capture.images.size() > 2 && i % static_cast<size_t>(config.holdout_stride) == 0) {
            holdout.push_back(i);
        } else {
            train_images.push_back(capture.images[i]);
            train_cameras.push_back(capture.cameras[i]);
        }
    }

    // Grid bounds follow the configured scene bounds.
    auto [scene_pre, scene_post] = resolve_scene_pair(config);
    VoxelGridField init(64, 64, 64, scene_pre.bounds);
    TrainResult result;
    try {
        result = train(train_images, train_cameras, config.train, std::move(init));
    } catch (const std::runtime_error& e) {
        throw NumericalError(e.what());
    }

    double psnr_sum = 0;
    for (size_t i : holdout) {
        Image rendered =
            render_image(result.field, capture.cameras[i], config.train.samples_per_ray);
        psnr_sum += image_psnr(rendered, capture.images[i]);
    }

    ordered_json log;
    log["iterations"] = config.train.iterations;
    log["final_loss"] = result.loss_log.empty() ? 0.0 : result.loss_log.back();
    log["holdout_views"] = holdout.size();
    log["holdout_psnr"] = holdout.empty() ? -1.0 : psnr_sum / holdout.size();
    json losses = json::array();
    for (size_t i = 0; i < result.loss_log.size(); i += 50) losses.push_back(result.loss_log[i]);
    log["loss_curve_every_50"] = losses;
    return {std::move(result.field), std::move(log)};
}

}  // namespace

void cmd_train(const PipelineConfig& config, const std::string& dataset_dir,
               const std::string& out_dir) {
    config.validate();
    if (!fs::exists(dataset_dir)) throw ConfigError("dataset path does not exist: " + dataset_dir);
    fs::create_directories(out_dir);

    if (config.backend == "oracle") {
        // No training: the analytic scenes are the fields.
        for (const char* side : {"pre", "post"}) {
            fs::path src = fs::path(dataset_dir) / (std::string("scene_") + side + ".json");
            if (!fs::exists(src)) throw DataError("oracle backend needs " + src.string());
            fs::copy_file(src, fs::path(out_dir) / (std::string("field_") +
                                                    (std::string(side) == "pre" ? "a" : "b") +
                                                    ".json"),
                          fs::copy_options::overwrite_existing);
        }
        write_config_snapshot(config, out_dir);
        return;
    }

    ordered_json log;
    for (const char* side : {"pre", "post"}) {
        Capture capture = load_capture(fs::path(dataset_dir) / side);
        auto [field, side_log] = train_side(config, capture);
        std::string name = std::string("field_") + (std::string(side) == "pre" ? "a" : "b") + ".rvf";
        field.save((fs::path(out_dir) / name).string());
        log[side] = side_log;
    }
    std::ofstream(fs::path(out_dir) / "train_log.json") << log.dump(2) << "\n";
    write_config_snapshot(config, out_dir);
}

std::shared_ptr<RadianceField> load_field(const std::string& path) {
    if (!fs::exists(path)) throw DataError("checkpoint not found: " + path);
    std::ifstream probe(path, std::ios::binary);
    char magic[8] = {};
    probe.read(magic, 8);
    if (std::string_view(magic, 8) == "RFCDVOXL") {
        try {
            return std::make_shared<VoxelGridField>(VoxelGridField::load(path));
        } catch (const std::runtime_error& e) {
            throw DataError(e.what());
        }
    }
    try {
        return std::make_shared<AnalyticField>(read_scene(path));
    } catch (const std::exception& e) {
        throw DataError("cannot load field from " + path + ": " + e.what());
    }
}

void cmd_detect(const PipelineConfig& config, const std::string& checkpoint_dir,
                const std::string& dataset_dir, const std::vector<int>& views,
                const std::string& out_dir) {
    config.validate();
    fs::path ckpt(checkpoint_dir);
    std::string a_path = fs::exists(ckpt / "field_a.rvf") ? (ckpt / "field_a.rvf").string()
                                                          : (ckpt / "field_a.json").string();
    std::string b_path = fs::exists(ckpt / "field_b.rvf") ? (ckpt / "field_b.rvf").string()
                                                          : (ckpt / "field_b.json").string();
    auto field_a = load_field(a_path);
    auto field_b = load_field(b_path);

    fs::path manifest = fs::path(dataset_dir) / "pre" / "poses.json";
    if (!fs::exists(manifest)) throw DataError("missing pose manifest: " + manifest.string());
    std::vector<PoseEntry> entries = read_pose_manifest(manifest.string());

    std::vector<int> selected = views;
    if (selected.empty()) {
        for (size_t i = 0; i < entries.size(); ++i) selected.push_back(static_cast<int>(i));
    }
    fs::create_directories(out_dir);
    ChangeRenderConfig rc = config.render_config();
    for (int idx : selected) {
        if (idx < 0 || static_cast<size_t>(idx) >= entries.size())
            throw ConfigError("view index out of range: " + std::to_string(idx));
        ChangeMap map = render_change_map(*field_a, *field_b, entries[idx].camera, rc);
        write_mask(map, (fs::path(out_dir) /
                         view_name("mask", static_cast<size_t>(idx), "pgm")).string());
    }
    // Arbitrary poses outside the capture set render the same way.
    for (size_t i = 0; i < config.novel_views.size(); ++i) {
        ChangeMap map = render_change_map(*field_a, *field_b, config.novel_views[i], rc);
        write_mask(map, (fs::path(out_dir) / view_name("novel", i, "pgm")).string());
    }
    write_config_snapshot(config, out_dir);
}

MetricsReport cmd_evaluate(const std::string& pred_dir, const std::string& gt_dir,
                           const std::string& report_path) {
    if (!fs::exists(pred_dir)) throw DataError("prediction directory not found: " + pred_dir);
    if (!fs::exists(gt_dir)) throw DataError("ground-truth directory not found: " + gt_dir);

    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(pred_dir)) {
        if (entry.path().extension() == ".pgm") names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    if (names.empty()) throw DataError("no .pgm masks in " + pred_dir);

    MetricsReport report;
    PixelMetrics totals;
    double f1_sum = 0, iou_sum = 0, map_sum = 0;
    for (const std::string& name : names) {
        fs::path gt_path = fs::path(gt_dir) / name;
        if (!fs::exists(gt_path))
            throw DataError("no ground-truth counterpart for " + name + " in " + gt_dir);
        ChangeMap pred = read_mask((fs::path(pred_dir) / name).string());
        ChangeMap gt = read_mask(gt_path.string());
        if (pred.width != gt.width || pred.height != gt.height)
            throw DataError("dimension mismatch for " + name);

        MetricsRecord record;
        record.view = name;
        record.pixels = pixel_metrics(pred, gt);
        record.map = map_score(extract_boxes(pred), extract_boxes(gt));
        report.per_view.push_back(record);

        totals.tp += record.pixels.tp;
        totals.fp += record.pixels.fp;
        totals.fn += record.pixels.fn;
        f1_sum += record.pixels.f1;
        iou_sum += record.pixels.iou;
        map_sum += record.map;
    }

    // Re-derive aggregate scores from the summed counts.
    report.aggregate = totals;
    if (totals.tp + totals.fp + totals.fn == 0) {
        report.aggregate.precision = report.aggregate.recall = 1.0;
        report.aggregate.f1 = report.aggregate.iou = 1.0;
    } else {
        auto& a = report.aggregate;
        a.precision = a.tp + a.fp > 0 ? static_cast<double>(a.tp) / (a.tp + a.fp) : 0.0;
        a.recall = a.tp + a.fn > 0 ? static_cast<double>(a.tp) / (a.tp + a.fn) : 0.0;
        a.f1 = a.precision + a.recall > 0 ? 2 * a.precision * a.recall / (a.precision + a.recall)
                                          : 0.0;
        a.iou = static_cast<double>(a.tp) / (a.tp + a.fp + a.fn);
    }
    report.mean_f1 = f1_sum / names.size();
    report.mean_iou = iou_sum / names.size();
    report.mean_map = map_sum / names.size();

    if (!report_path.empty()) write_metrics_report(report, report_path);
    return report;
}

}  // namespace rfcd
