#pragma once

#include <string>
#include <vector>

#include "rfcd/alignment.hpp"
#include "rfcd/camera.hpp"
#include "rfcd/metrics.hpp"
#include "rfcd/scene.hpp"
#include "rfcd/trajectory.hpp"

namespace rfcd {

// Human-readable structured-text (JSON) serialization for every artifact
// that crosses a file boundary: per-image pose manifests, scene and
// trajectory specs, similarity transforms, and metrics reports.

struct PoseEntry {
    std::string image;  // file name relative to the manifest
    Camera camera;
};

std::string to_json(const Camera& camera);
Camera camera_from_json(const std::string& text);

void write_pose_manifest(const std::vector<PoseEntry>& entries, const std::string& path);
std::vector<PoseEntry> read_pose_manifest(const std::string& path);

std::string scene_to_json(const SceneSpec& scene);
SceneSpec scene_from_json(const std::string& text);
void write_scene(const SceneSpec& scene, const std::string& path);
SceneSpec read_scene(const std::string& path);

std::string trajectory_to_json(const TrajectorySpec& spec);
TrajectorySpec trajectory_from_json(const std::string& text);

std::string transform_to_json(const SimilarityTransform& t);
SimilarityTransform transform_from_json(const std::string& text);
void write_transform(const SimilarityTransform& t, const std::string& path);
SimilarityTransform read_transform(const std::string& path);

struct MetricsRecord {
    std::string view;
    PixelMetrics pixels;
    double map = -1.0;  // negative when box scoring was not requested
};

struct MetricsReport {
    std::vector<MetricsRecord> per_view;
    PixelMetrics aggregate;       // from summed confusion counts
    double mean_f1 = 0.0;         // plain means of the per-view scores
    double mean_iou = 0.0;
    double mean_map = -1.0;
};

void write_metrics_report(const MetricsReport& report, const std::string& path);
MetricsReport read_metrics_report(const std::string& path);

}  // namespace rfcd
