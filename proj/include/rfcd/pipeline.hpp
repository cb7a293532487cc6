#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfcd/change_detect.hpp"
#include "rfcd/change_render.hpp"
#include "rfcd/manifest.hpp"
#include "rfcd/scene_presets.hpp"
#include "rfcd/voxel_field.hpp"

namespace rfcd {

// Failure classes map to distinct CLI exit codes.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Everything one end-to-end run needs; serializes field-for-field to JSON.
struct PipelineConfig {
    // scene pair: a named preset, or explicit pre/post scenes
    std::string scene_preset = "moved_box";
    bool has_inline_scenes = false;
    SceneSpec scene_pre;
    SceneSpec scene_post;

    TrajectorySpec trajectory;
    std::string backend = "oracle";  // oracle | voxel
    TrainConfig train;
    int holdout_stride = 10;  // every Nth view held out of training for PSNR

    Thresholds thresholds;
    int views_per_point = 5;
    int window_count = 16;
    double window_half_width_factor = 2.0;
    int samples_per_ray = 128;
    std::uint64_t seed = 0;
    std::vector<Camera> novel_views;  // poses outside the capture set to detect from

    ChangeRenderConfig render_config() const;
    void validate() const;
};

std::string pipeline_config_to_json(const PipelineConfig& config);
PipelineConfig pipeline_config_from_json(const std::string& text);
PipelineConfig load_pipeline_config(const std::string& path);

/// Resolves the configured scene pair (preset or inline).
std::pair<SceneSpec, SceneSpec> resolve_scene_pair(const PipelineConfig& config);

/// generate: renders the pre/post capture sets from the analytic scene pair
/// and writes images, pose manifests, ground-truth masks, and a config
/// snapshot under out_dir.
void cmd_generate(const PipelineConfig& config, const std::string& out_dir);

/// train: produces two aligned field checkpoints from a generated dataset.
/// The oracle backend emits the scene descriptors; the voxel backend runs
/// SGD per capture and logs the loss curve and held-out PSNR.
void cmd_train(const PipelineConfig& config, const std::string& dataset_dir,
               const std::string& out_dir);

/// detect: renders one change map per requested view (indices into the
/// dataset's pose manifest; empty = all) plus one per configured novel pose
/// (masks named novel_NNNN.pgm).
void cmd_detect(const PipelineConfig& config, const std::string& checkpoint_dir,
                const std::string& dataset_dir, const std::vector<int>& views,
                const std::string& out_dir);

/// evaluate: pixel metrics and box MAP of predicted masks against ground
/// truth, written as a JSON report (and returned).
MetricsReport cmd_evaluate(const std::string& pred_dir, const std::string& gt_dir,
                           const std::string& report_path);

/// Loads either checkpoint flavor: voxel (.rvf binary) or oracle (scene JSON).
std::shared_ptr<RadianceField> load_field(const std::string& path);

}  // namespace rfcd
