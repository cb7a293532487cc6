#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "rfcd/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

rfcd::PipelineConfig load_config(const std::string& path, long long seed_override) {
    rfcd::PipelineConfig config =
        path.empty() ? rfcd::PipelineConfig{} : rfcd::load_pipeline_config(path);
    if (seed_override >= 0) {
        config.seed = static_cast<std::uint64_t>(seed_override);
        config.train.seed = config.seed;
        config.trajectory.seed = config.seed;
    }
    return config;
}

std::vector<int> parse_views(const std::string& views) {
    std::vector<int> out;
    if (views.empty() || views == "all") return out;
    size_t pos = 0;
    while (pos < views.size()) {
        size_t comma = views.find(',', pos);
        if (comma == std::string::npos) comma = views.size();
        out.push_back(std::stoi(views.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radiance-field change detection toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir, dataset_dir, checkpoint_dir, pred_dir, gt_dir;
    std::string views = "all", backend;
    long long seed = -1;

    auto* generate = app.add_subcommand("generate", "Render a synthetic pre/post dataset");
    generate->add_option("--config", config_path, "pipeline config JSON");
    generate->add_option("--out", out_dir, "output dataset directory")->required();
    generate->add_option("--seed", seed, "override all seeds");

    auto* train = app.add_subcommand("train", "Build the two aligned field checkpoints");
    train->add_option("--config", config_path, "pipeline config JSON");
    train->add_option("--data", dataset_dir, "dataset directory from 'generate'")->required();
    train->add_option("--out", out_dir, "checkpoint output directory")->required();
    train->add_option("--backend", backend, "oracle | voxel (overrides config)");
    train->add_option("--seed", seed, "override all seeds");

    auto* detect = app.add_subcommand("detect", "Render change maps for chosen views");
    detect->add_option("--config", config_path, "pipeline config JSON");
    detect->add_option("--checkpoints", checkpoint_dir, "directory from 'train'")->required();
    detect->add_option("--data", dataset_dir, "dataset directory (pose source)")->required();
    detect->add_option("--views", views, "comma-separated view indices or 'all'");
    detect->add_option("--out", out_dir, "mask output directory")->required();
    detect->add_option("--seed", seed, "override all seeds");

    auto* evaluate = app.add_subcommand("evaluate", "Score predicted masks against ground truth");
    evaluate->add_option("--pred", pred_dir, "predicted mask directory")->required();
    evaluate->add_option("--gt", gt_dir, "ground-truth mask directory")->required();
    evaluate->add_option("--out", out_dir, "report path (JSON)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            rfcd::cmd_generate(load_config(config_path, seed), out_dir);
            std::cout << "dataset written to " << out_dir << "\n";
        } else if (train->parsed()) {
            rfcd::PipelineConfig config = load_config(config_path, seed);
            if (!backend.empty()) config.backend = backend;
            rfcd::cmd_train(config, dataset_dir, out_dir);
            std::cout << "checkpoints written to " << out_dir << "\n";
        } else if (detect->parsed()) {
            rfcd::cmd_detect(load_config(config_path, seed), checkpoint_dir, dataset_dir,
                             parse_views(views), out_dir);
            std::cout << "masks written to " << out_dir << "\n";
        } else if (evaluate->parsed()) {
            rfcd::MetricsReport report = rfcd::cmd_evaluate(pred_dir, gt_dir, out_dir);
            std::printf("%-16s %9s %9s %9s %9s %9s\n", "view", "P", "R", "F1", "IoU", "MAP");
            for (const auto& r : report.per_view) {
                std::printf("%-16s %9.4f %9.4f %9.4f %9.4f %9.4f\n", r.view.c_str(),
                            r.pixels.precision, r.pixels.recall, r.pixels.f1, r.pixels.iou, r.map);
            }
            std::printf("%-16s %9.4f %9.4f %9.4f %9.4f %9.4f\n", "aggregate",
                        report.aggregate.precision, report.aggregate.recall, report.aggregate.f1,
                        report.aggregate.iou, report.mean_map);
        }
    } catch (const rfcd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const rfcd::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const rfcd::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
