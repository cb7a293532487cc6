#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "rfcd/pipeline.hpp"

using namespace rfcd;
namespace fs = std::filesystem;

namespace {

/// Desk-mini configuration: small images, few views, oracle backend.
PipelineConfig mini_config() {
    PipelineConfig c;
    c.scene_preset = "moved_box";
    c.trajectory.per_circle = 2;
    c.trajectory.image_width = 48;
    c.trajectory.image_height = 36;
    c.trajectory.focal_px = 50.0;
    c.backend = "oracle";
    c.samples_per_ray = 64;
    return c;
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// Byte content of every regular file under a directory, keyed by relative
/// path. The comparison currency for determinism checks.
std::map<std::string, std::string> dir_contents(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        out[fs::relative(entry.path(), dir).string()] =
            std::string(std::istreambuf_iterator<char>(in), {});
    }
    return out;
}

}  // namespace

TEST_CASE("config JSON round trip") {
    PipelineConfig c = mini_config();
    c.thresholds.eps_c = 75.0;
    c.views_per_point = 3;
    c.seed = 42;
    PipelineConfig back = pipeline_config_from_json(pipeline_config_to_json(c));
    CHECK(back.scene_preset == c.scene_preset);
    CHECK(back.trajectory.per_circle == 2);
    CHECK(back.thresholds.eps_c == 75.0);
    CHECK(back.views_per_point == 3);
    CHECK(back.seed == 42);
    CHECK(back.samples_per_ray == 64);

    CHECK_THROWS_AS(pipeline_config_from_json("{nope"), ConfigError);
    CHECK_THROWS_AS(pipeline_config_from_json("{\"backend\": \"magic\"}"), ConfigError);
    CHECK_THROWS_AS(pipeline_config_from_json("{\"scene_preset\": \"missing_scene\"}"),
                    ConfigError);
}

TEST_CASE("generate writes a complete, reproducible dataset") {
    PipelineConfig c = mini_config();
    fs::path d1 = fresh_dir("rfcd_ds1");
    cmd_generate(c, d1.string());

    SUBCASE("directory layout and counts") {
        int n = c.trajectory.camera_count();
        REQUIRE(n == 6);
        for (const char* side : {"pre", "post"}) {
            CHECK(fs::exists(d1 / side / "poses.json"));
            int images = 0;
            for (const auto& e : fs::directory_iterator(d1 / side / "images")) {
                CHECK(e.path().extension() == ".ppm");
                ++images;
            }
            CHECK(images == n);
            CHECK(read_pose_manifest((d1 / side / "poses.json").string()).size() ==
                  static_cast<size_t>(n));
        }
        int masks = 0;
        for (const auto& e : fs::directory_iterator(d1 / "masks")) {
            CHECK(e.path().extension() == ".pgm");
            ++masks;
        }
        CHECK(masks == n);
        CHECK(fs::exists(d1 / "config.json"));
        CHECK(fs::exists(d1 / "scene_pre.json"));
        CHECK(fs::exists(d1 / "scene_post.json"));
    }

    SUBCASE("same config and seed produce byte-identical output") {
        fs::path d2 = fresh_dir("rfcd_ds2");
        cmd_generate(c, d2.string());
        CHECK(dir_contents(d1) == dir_contents(d2));
        fs::remove_all(d2);
    }
    fs::remove_all(d1);
}

TEST_CASE("oracle train emits field descriptors; detect and evaluate close the loop") {
    PipelineConfig c = mini_config();
    fs::path data = fresh_dir("rfcd_loop_data");
    fs::path ckpt = fresh_dir("rfcd_loop_ckpt");
    fs::path masks = fresh_dir("rfcd_loop_masks");
    cmd_generate(c, data.string());
    cmd_train(c, data.string(), ckpt.string());

    CHECK(fs::exists(ckpt / "field_a.json"));
    CHECK(fs::exists(ckpt / "field_b.json"));

    SUBCASE("loaded oracle fields match the scenes") {
        auto field = load_field((ckpt / "field_a.json").string());
        RadianceSample s = field->query({-0.35, 0.1, 0.15}, {0, 1, 0});
        CHECK(s.density == 8.0);
    }

    SUBCASE("detect renders masks that evaluate cleanly against ground truth") {
        cmd_detect(c, ckpt.string(), data.string(), {0, 1, 2}, masks.string());
        CHECK(fs::exists(masks / "mask_0000.pgm"));
        CHECK(fs::exists(masks / "mask_0002.pgm"));
        CHECK(!fs::exists(masks / "mask_0003.pgm"));

        fs::path report = masks / "report.json";
        MetricsReport r = cmd_evaluate(masks.string(), (data / "masks").string(), report.string());
        REQUIRE(r.per_view.size() == 3);
        CHECK(fs::exists(report));
        // Oracle fields against oracle ground truth: near-perfect per view.
        for (const auto& v : r.per_view) CHECK(v.pixels.iou > 0.8);
        // Aggregate counts equal the sum of the per-view counts, and the
        // mean scores equal the per-view means.
        std::uint64_t tp = 0;
        double f1 = 0, iou = 0, map = 0;
        for (const auto& v : r.per_view) {
            tp += v.pixels.tp;
            f1 += v.pixels.f1;
            iou += v.pixels.iou;
            map += v.map;
        }
        CHECK(r.aggregate.tp == tp);
        CHECK(r.mean_f1 == f1 / r.per_view.size());
        CHECK(r.mean_iou == iou / r.per_view.size());
        CHECK(r.mean_map == map / r.per_view.size());
    }

    SUBCASE("a novel pose absent from the capture set still renders a mask") {
        PipelineConfig with_novel = c;
        Camera novel;
        novel.width = c.trajectory.image_width;
        novel.height = c.trajectory.image_height;
        novel.fx = novel.fy = c.trajectory.focal_px;
        novel.cx = novel.width / 2.0;
        novel.cy = novel.height / 2.0;
        novel.near = 0.3;
        novel.far = 6.0;
        novel.pose = look_at({1.3, -1.3, 0.9}, {0, 0, 0.15});
        with_novel.novel_views.push_back(novel);

        // The snapshot carries the novel pose through serialization too.
        PipelineConfig reparsed =
            pipeline_config_from_json(pipeline_config_to_json(with_novel));
        REQUIRE(reparsed.novel_views.size() == 1);

        fs::path out = fresh_dir("rfcd_loop_novel");
        cmd_detect(reparsed, ckpt.string(), data.string(), {0}, out.string());
        CHECK(fs::exists(out / "mask_0000.pgm"));
        REQUIRE(fs::exists(out / "novel_0000.pgm"));
        ChangeMap m = read_mask((out / "novel_0000.pgm").string());
        CHECK(m.count_changed() > 0);  // the moved crate is visible from there
        fs::remove_all(out);
    }

    SUBCASE("detect with an identical checkpoint pair is silent") {
        fs::path same = fresh_dir("rfcd_loop_same");
        fs::copy_file(ckpt / "field_a.json", same / "field_a.json",
                      fs::copy_options::overwrite_existing);
        fs::copy_file(ckpt / "field_a.json", same / "field_b.json",
                      fs::copy_options::overwrite_existing);
        fs::path out = fresh_dir("rfcd_loop_zero");
        cmd_detect(c, same.string(), data.string(), {0}, out.string());
        ChangeMap m = read_mask((out / "mask_0000.pgm").string());
        CHECK(m.count_changed() == 0);
        fs::remove_all(same);
        fs::remove_all(out);
    }

    fs::remove_all(data);
    fs::remove_all(ckpt);
    fs::remove_all(masks);
}

TEST_CASE("error classes for the CLI exit codes") {
    PipelineConfig c = mini_config();
    SUBCASE("missing dataset path fails before any compute") {
        CHECK_THROWS_AS(cmd_train(c, "/nonexistent/rfcd_path", "/tmp/rfcd_never"), ConfigError);
    }
    SUBCASE("missing manifest is a data error") {
        fs::path empty = fresh_dir("rfcd_empty_ds");
        CHECK_THROWS_AS(cmd_detect(c, empty.string(), empty.string(), {}, empty.string()),
                        DataError);
        fs::remove_all(empty);
    }
    SUBCASE("evaluate on mismatched dimensions is a data error") {
        fs::path a = fresh_dir("rfcd_eval_a");
        fs::path b = fresh_dir("rfcd_eval_b");
        ChangeMap small(8, 8), big(9, 9);
        write_mask(small, (a / "mask_0000.pgm").string());
        write_mask(big, (b / "mask_0000.pgm").string());
        CHECK_THROWS_AS(cmd_evaluate(a.string(), b.string(), ""), DataError);
        fs::remove_all(a);
        fs::remove_all(b);
    }
    SUBCASE("out-of-range view index is a config error") {
        fs::path data = fresh_dir("rfcd_idx_data");
        fs::path ckpt = fresh_dir("rfcd_idx_ckpt");
        cmd_generate(c, data.string());
        cmd_train(c, data.string(), ckpt.string());
        CHECK_THROWS_AS(cmd_detect(c, ckpt.string(), data.string(), {99}, data.string()),
                        ConfigError);
        fs::remove_all(data);
        fs::remove_all(ckpt);
    }
}

TEST_CASE("voxel checkpoints flow through detect") {
    PipelineConfig c = mini_config();
    fs::path ckpt = fresh_dir("rfcd_vox_ckpt");
    fs::path data = fresh_dir("rfcd_vox_data");
    cmd_generate(c, data.string());

    // Hand-made voxel fields standing in for a training run.
    VoxelGridField grid(8, 8, 8, Aabb{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}});
    grid.save((ckpt / "field_a.rvf").string());
    grid.save((ckpt / "field_b.rvf").string());

    fs::path out = fresh_dir("rfcd_vox_masks");
    cmd_detect(c, ckpt.string(), data.string(), {0}, out.string());
    ChangeMap m = read_mask((out / "mask_0000.pgm").string());
    CHECK(m.count_changed() == 0);  // identical fields

    fs::remove_all(ckpt);
    fs::remove_all(data);
    fs::remove_all(out);
}
