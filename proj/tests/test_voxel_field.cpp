#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "rfcd/rng.hpp"
#include "rfcd/voxel_field.hpp"
#include "rfcd/volume_render.hpp"

using namespace rfcd;

namespace {

VoxelGridField small_grid(int n = 4) {
    return VoxelGridField(n, n, n, Aabb{{-1, -1, -1}, {1, 1, 1}});
}

VoxelGridField random_grid(int n, std::uint64_t seed) {
    VoxelGridField f = small_grid(n);
    Rng rng(seed);
    for (float& v : f.raw_density()) v = static_cast<float>(rng.uniform(-3, 3));
    for (float& v : f.raw_color()) v = static_cast<float>(rng.uniform(-2, 2));
    return f;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("query at a node returns that node's activated values") {
    VoxelGridField f = small_grid(3);  // nodes at -1, 0, 1 per axis
    std::size_t node = f.node_index(1, 1, 1);
    f.raw_density()[node] = 1.25f;
    f.raw_color()[3 * node + 0] = 0.5f;
    f.raw_color()[3 * node + 1] = -0.5f;
    f.raw_color()[3 * node + 2] = 2.0f;

    RadianceSample s = f.query({0, 0, 0}, {0, 0, -1});
    CHECK(s.density == doctest::Approx(softplus(1.25f)).epsilon(1e-12));
    CHECK(s.color.x == doctest::Approx(sigmoid(0.5f)).epsilon(1e-12));
    CHECK(s.color.y == doctest::Approx(sigmoid(-0.5f)).epsilon(1e-12));
    CHECK(s.color.z == doctest::Approx(sigmoid(2.0f)).epsilon(1e-12));
}

TEST_CASE("midpoint query interpolates activated values, not raw ones") {
    VoxelGridField f = small_grid(3);
    double a = -1.5, b = 2.5;
    f.raw_density()[f.node_index(1, 1, 1)] = static_cast<float>(a);
    f.raw_density()[f.node_index(2, 1, 1)] = static_cast<float>(b);
    // midpoint of nodes (1,1,1)=(0,0,0) and (2,1,1)=(1,0,0)
    RadianceSample s = f.query({0.5, 0, 0}, {0, 0, -1});
    double activated_mean = (softplus(static_cast<float>(a)) + softplus(static_cast<float>(b))) / 2;
    double raw_mean_activated = softplus((a + b) / 2);
    CHECK(s.density == doctest::Approx(activated_mean).epsilon(1e-12));
    CHECK(std::abs(s.density - raw_mean_activated) > 1e-3);  // the two orders differ
}

TEST_CASE("query outside the bounds is empty space") {
    VoxelGridField f = random_grid(4, 1);
    RadianceSample s = f.query({5, 0, 0}, {0, 0, -1});
    CHECK(s.density == 0.0);
    CHECK(s.color == Vec3{0, 0, 0});
}

TEST_CASE("query is continuous across voxel boundaries") {
    VoxelGridField f = random_grid(5, 2);
    // Node planes for a 5-node grid over [-1,1] sit at every 0.5.
    for (double plane : {-0.5, 0.0, 0.5}) {
        double prev_gap = -1;
        for (double eps : {1e-3, 1e-5, 1e-7}) {
            RadianceSample lo = f.query({plane - eps, 0.17, -0.23}, {0, 0, -1});
            RadianceSample hi = f.query({plane + eps, 0.17, -0.23}, {0, 0, -1});
            double gap = std::abs(lo.density - hi.density) + norm(lo.color - hi.color);
            if (prev_gap >= 0) CHECK(gap < prev_gap + 1e-12);
            prev_gap = gap;
        }
        CHECK(prev_gap < 1e-5);
    }
}

TEST_CASE("activated outputs satisfy the sample invariants for any raws") {
    Rng rng(3);
    VoxelGridField f = small_grid(4);
    for (float& v : f.raw_density()) v = static_cast<float>(rng.uniform(-100, 100));
    for (float& v : f.raw_color()) v = static_cast<float>(rng.uniform(-100, 100));
    for (int i = 0; i < 500; ++i) {
        Vec3 x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        RadianceSample s = f.query(x, {0, 0, -1});
        CHECK(s.density >= 0.0);
        for (int ch = 0; ch < 3; ++ch) {
            CHECK(s.color[ch] >= 0.0);
            CHECK(s.color[ch] <= 1.0);
        }
    }
}

TEST_CASE("checkpoint round trip") {
    VoxelGridField f = random_grid(6, 4);
    auto p1 = temp_file("rfcd_ckpt_a.rvf");
    auto p2 = temp_file("rfcd_ckpt_b.rvf");
    f.save(p1.string());
    VoxelGridField g = VoxelGridField::load(p1.string());
    g.save(p2.string());

    SUBCASE("save -> load -> save produces identical bytes") {
        std::ifstream a(p1, std::ios::binary), b(p2, std::ios::binary);
        std::string bytes_a(std::istreambuf_iterator<char>(a), {});
        std::string bytes_b(std::istreambuf_iterator<char>(b), {});
        CHECK(bytes_a == bytes_b);
        CHECK(!bytes_a.empty());
    }
    SUBCASE("queries agree before and after the round trip") {
        Rng rng(5);
        for (int i = 0; i < 100; ++i) {
            Vec3 x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            RadianceSample a = f.query(x, {0, 0, -1});
            RadianceSample b = g.query(x, {0, 0, -1});
            CHECK(a.density == b.density);
            CHECK(a.color == b.color);
        }
    }
    SUBCASE("version tag mismatch refuses to load") {
        std::fstream file(p1, std::ios::binary | std::ios::in | std::ios::out);
        file.seekp(8);  // version field follows the magic
        std::uint32_t bad = 999;
        file.write(reinterpret_cast<const char*>(&bad), 4);
        file.close();
        CHECK_THROWS_AS(VoxelGridField::load(p1.string()), std::runtime_error);
    }
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("finite differences agree with the analytic gradients") {
    Ray ray{{-2, 0.05, 0.1}, {1, 0, 0}, 0.5, 3.5};

    SUBCASE("near-linear toy: single window, sigma fixed, color raws at zero") {
        // At raw color 0 the sigmoid's second derivative vanishes, so the
        // one-sample loss is locally quadratic and central differences are
        // exact to roundoff.
        VoxelGridField f = small_grid(3);
        for (float& v : f.raw_density()) v = 0.5f;
        double err = gradient_check(f, ray, 1, 1e-4, 50, 7, /*color_only=*/true);
        CHECK(err < 1e-8);
    }
    SUBCASE("random 8^3 grid, K=32") {
        VoxelGridField f = random_grid(8, 11);
        double err = gradient_check(f, ray, 32, 1e-4, 100, 13);
        CHECK(err < 1e-3);
    }
    SUBCASE("zero-density grid kills the color gradients") {
        VoxelGridField f = small_grid(4);
        for (float& v : f.raw_density()) v = -1000.0f;  // softplus underflows to exactly 0
        auto [grad_d, grad_c] = ray_photometric_gradients(f, ray, 16, {0.3, 0.3, 0.3});
        for (double g : grad_c) CHECK(g == 0.0);
    }
}

TEST_CASE("training") {
    // One opaque 2^3 grid seen by a single-pixel camera.
    auto make_setup = [](int width = 1, int height = 1) {
        Camera cam;
        cam.width = width;
        cam.height = height;
        cam.fx = cam.fy = 2.0;
        cam.cx = width / 2.0;
        cam.cy = height / 2.0;
        cam.pose = look_at({0, -3, 0}, {0, 0, 0});
        cam.near = 1.0;
        cam.far = 5.0;
        return cam;
    };

    SUBCASE("zero iterations returns the initial field unchanged") {
        VoxelGridField init = random_grid(3, 21);
        std::vector<float> d = init.raw_density(), c = init.raw_color();
        TrainConfig cfg;
        cfg.iterations = 0;
        Camera cam = make_setup(4, 4);
        std::vector<Image> imgs{Image(4, 4)};
        std::vector<Camera> cams{cam};
        TrainResult r = train(imgs, cams, cfg, std::move(init));
        CHECK(r.field.raw_density() == d);
        CHECK(r.field.raw_color() == c);
        CHECK(r.loss_log.empty());
    }

    SUBCASE("single opaque voxel group converges to the target color") {
        VoxelGridField init(2, 2, 2, Aabb{{-1, -1, -1}, {1, 1, 1}});
        for (float& v : init.raw_density()) v = 3.0f;  // sigma ~ 3, optical depth ~ 6

        Camera cam = make_setup();
        Image target(1, 1);
        target.at(0, 0) = {0.2, 0.4, 0.6};

        TrainConfig cfg;
        cfg.iterations = 400;
        cfg.learning_rate = 150.0;
        cfg.rays_per_batch = 16;
        cfg.samples_per_ray = 48;
        cfg.density_reg = 0.0;
        cfg.seed = 17;
        TrainResult r = train({target}, {cam}, cfg, std::move(init));

        Vec3 got = render_pixel(r.field, pixel_ray(cam, 0, 0), 48);
        CHECK(norm(got - Vec3{0.2, 0.4, 0.6}) < 1e-2);

        // Windowed-mean loss decreases over the run.
        double early = 0, late = 0;
        for (int i = 0; i < 100; ++i) early += r.loss_log[i];
        for (int i = 300; i < 400; ++i) late += r.loss_log[i];
        CHECK(late < early);
    }

    SUBCASE("identical seeds are bit-reproducible") {
        Camera cam = make_setup(8, 6);
        Image img(8, 6);
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 8; ++x) img.at(x, y) = {x / 8.0, y / 6.0, 0.5};
        TrainConfig cfg;
        cfg.iterations = 30;
        cfg.rays_per_batch = 64;
        cfg.samples_per_ray = 24;
        cfg.seed = 99;
        TrainResult a = train({img}, {cam}, cfg, random_grid(4, 5));
        TrainResult b = train({img}, {cam}, cfg, random_grid(4, 5));
        CHECK(a.field.raw_density() == b.field.raw_density());
        CHECK(a.field.raw_color() == b.field.raw_color());
        CHECK(a.loss_log == b.loss_log);
    }

    SUBCASE("non-finite loss aborts with the iteration index") {
        VoxelGridField init = small_grid(3);
        for (float& v : init.raw_density()) v = std::numeric_limits<float>::quiet_NaN();
        Camera cam = make_setup(4, 4);
        cam.fx = cam.fy = 4.0;  // narrow enough that every pixel ray crosses the grid
        TrainConfig cfg;
        cfg.iterations = 5;
        cfg.rays_per_batch = 32;
        cfg.samples_per_ray = 16;
        std::vector<Image> imgs{Image(4, 4)};
        CHECK_THROWS_WITH_AS(train(imgs, {cam}, cfg, std::move(init)),
                             "train: non-finite loss at iteration 0", std::runtime_error);
    }
}
