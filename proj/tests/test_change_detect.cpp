#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rfcd/change_detect.hpp"
#include "rfcd/field_adapters.hpp"
#include "rfcd/rng.hpp"
#include "rfcd/scene.hpp"
#include "rfcd/scene_presets.hpp"

using namespace rfcd;

namespace {

/// Reference ray aimed at x from a chosen eye position.
Ray aim_at(const Vec3& eye, const Vec3& x, double near = 0.05, double far = 6.0) {
    return Ray{eye, normalized(x - eye), near, far};
}

WindowConfig default_window() {
    WindowConfig w;
    w.count = 16;
    w.half_width = 0.09;
    return w;
}

}  // namespace

TEST_CASE("change_representation input checks") {
    ScenePairPreset preset = scene_preset("unchanged");
    AnalyticField field(preset.pre);
    Vec3 x{0, 0, 0.1};
    Ray ray = aim_at({0, -2, 0.3}, x);

    SUBCASE("off-ray point is rejected") {
        CHECK_THROWS_AS(change_representation(field, field, x + Vec3{0.1, 0, 0}, ray,
                                              default_window()),
                        std::invalid_argument);
    }
    SUBCASE("window outside [near, far] is rejected") {
        Ray tight = aim_at({0, -2, 0.3}, x, 1.99, 2.1);
        CHECK_THROWS_AS(change_representation(field, field, x, tight, default_window()),
                        std::invalid_argument);
    }
}

TEST_CASE("identical fields give an all-zero representation") {
    ScenePairPreset preset = scene_preset("moved_box");
    AnalyticField field(preset.pre);
    Vec3 x{-0.35, -0.05, 0.15};  // crate front face region
    Ray ray = aim_at({-0.35, -2.0, 0.3}, x);
    ChangeRepresentation rep = change_representation(field, field, x, ray, default_window());
    CHECK(rep.color_norm() == 0.0);
    CHECK(rep.density_norm() == 0.0);
}

TEST_CASE("recolor flags color but not density; removal flags density") {
    ScenePairPreset recolor = scene_preset("recolor_box");
    AnalyticField a(recolor.pre), b(recolor.post);

    // Front surface of the crate as seen from -y.
    Vec3 x{-0.35, -0.05, 0.15};
    Ray ray = aim_at({-0.35, -2.0, 0.15}, x);
    ChangeRepresentation rep = change_representation(a, b, x, ray, default_window());
    CHECK(rep.color_norm() > 0.0);
    CHECK(rep.density_norm() == 0.0);  // geometry untouched

    // Moved crate: the vacated region sees pure density change.
    ScenePairPreset moved = scene_preset("moved_box");
    AnalyticField ma(moved.pre), mb(moved.post);
    Vec3 vacated{-0.35, 0.1, 0.15};  // old crate center, empty afterwards
    Ray ray2 = aim_at({-0.35, -2.0, 0.2}, vacated);
    ChangeRepresentation rep2 = change_representation(ma, mb, vacated, ray2, default_window());
    CHECK(rep2.density_norm() > 0.0);
}

TEST_CASE("per_view_indicators thresholds in the 0-255 color domain") {
    Thresholds th;
    th.eps_c = 120.0;
    th.eps_sigma = 100.0;

    SUBCASE("zero representation never fires") {
        ChangeRepresentation rep;
        rep.color_diffs = {0, 0, 0};
        rep.density_diffs = {0, 0, 0};
        ChangeIndicators v = per_view_indicators(rep, th);
        CHECK_FALSE(v.v_c);
        CHECK_FALSE(v.v_sigma);
    }
    SUBCASE("norm of 200 (0-255 domain) clears a 120 threshold") {
        ChangeRepresentation rep;
        rep.color_diffs = {100.0 / 255.0, 100.0 / 255.0};
        rep.density_diffs = {0};
        CHECK(per_view_indicators(rep, th).v_c);
    }
    SUBCASE("norm exactly at the threshold stays false (strict inequality)") {
        Thresholds exact;
        exact.eps_c = 51.0;
        exact.eps_sigma = 7.0;
        ChangeRepresentation rep;
        rep.color_diffs = {51.0 / 255.0};
        rep.density_diffs = {7.0};
        ChangeIndicators v = per_view_indicators(rep, exact);
        CHECK_FALSE(v.v_c);
        CHECK_FALSE(v.v_sigma);
    }
    SUBCASE("thresholds must be positive") {
        Thresholds bad;
        bad.eps_c = 0.0;
        ChangeRepresentation rep;
        CHECK_THROWS_AS(per_view_indicators(rep, bad), std::invalid_argument);
    }
}

TEST_CASE("sample_view_set geometry") {
    Vec3 x{0.2, -0.1, 0.3};
    Ray ref = aim_at({1.8, -1.2, 0.5}, x);

    SUBCASE("surround with V=5 lands on -90,-45,0,45,90 degrees") {
        ViewSet set = sample_view_set(SceneMode::Surround, x, ref, 5, ViewCone{});
        REQUIRE(set.rays.size() == 5);
        const double offsets[] = {-90, -45, 0, 45, 90};
        for (int i = 0; i < 5; ++i) {
            Vec3 expect = rotation_z(offsets[i] * std::numbers::pi / 180.0) * ref.direction;
            CHECK(norm(set.rays[i].direction - expect) < 1e-12);
        }
    }
    SUBCASE("every sampled ray passes through x") {
        for (SceneMode mode : {SceneMode::Surround, SceneMode::ForwardFacing}) {
            ViewSet set = sample_view_set(mode, x, ref, 7, ViewCone{0.25, 0.1});
            for (const Ray& ray : set.rays) {
                double t = dot(x - ray.origin, ray.direction);
                CHECK(norm(ray.at(t) - x) < 1e-9);
                CHECK(std::abs(norm(ray.direction) - 1.0) < 1e-12);
            }
        }
    }
    SUBCASE("forward-facing directions stay inside the capture cone") {
        ViewCone cone{0.22, 0.08};
        ViewSet set = sample_view_set(SceneMode::ForwardFacing, x, ref, 5, cone);
        REQUIRE(set.rays.size() == 5);
        CHECK(norm(set.rays[0].direction - ref.direction) < 1e-12);
        // Aggregate angle stays within the wider half-angle; the vertical
        // component respects the narrower one.
        Vec3 e1 = normalized(cross(ref.direction, Vec3{0, 0, 1}));
        Vec3 e2 = normalized(cross(e1, ref.direction));
        for (const Ray& ray : set.rays) {
            double angle = std::acos(std::clamp(dot(ray.direction, ref.direction), -1.0, 1.0));
            CHECK(angle <= std::max(cone.lateral, cone.vertical) + 1e-9);
            double vert = std::abs(std::atan2(dot(ray.direction, e2),
                                              dot(ray.direction, ref.direction)));
            CHECK(vert <= cone.vertical + 1e-9);
        }
    }
    SUBCASE("V=0 is rejected") {
        CHECK_THROWS_AS(sample_view_set(SceneMode::Surround, x, ref, 0, ViewCone{}),
                        std::invalid_argument);
    }
}

TEST_CASE("detect_change_point is the AND over views") {
    ScenePairPreset moved = scene_preset("moved_box");
    AnalyticField a(moved.pre), b(moved.post);
    Thresholds th;  // defaults: 60 / 100

    Vec3 x{-0.35, 0.1, 0.15};  // vacated crate center
    Ray ref = aim_at({-0.35, -1.9, 0.35}, x);
    WindowConfig window = default_window();

    SUBCASE("V=1 reduces exactly to per_view_indicators") {
        ViewSet one = sample_view_set(SceneMode::Surround, x, ref, 1, ViewCone{});
        ChangeIndicators direct =
            per_view_indicators(change_representation(a, b, x, one.rays[0], window), th);
        ChangeIndicators agg = detect_change_point(a, b, x, one, th, window);
        CHECK(agg.v_c == direct.v_c);
        CHECK(agg.v_sigma == direct.v_sigma);
    }

    SUBCASE("a real change fires across all five views") {
        // Probe just inside the old crate's front face, where the detector's
        // argmax-weight rule would land.
        Vec3 probe{-0.35, -0.01, 0.12};
        Ray pref = aim_at({-0.35, -1.9, 0.25}, probe);
        ViewSet five = sample_view_set(SceneMode::Surround, probe, pref, 5, ViewCone{});
        ChangeIndicators agg = detect_change_point(a, b, probe, five, th, window);
        CHECK(agg.any());
        // and per-view, every single one fired (the Fig. 3 claim)
        for (const Ray& ray : five.rays) {
            ChangeIndicators one =
                per_view_indicators(change_representation(a, b, probe, ray, window), th);
            CHECK(one.any());
        }
    }

    SUBCASE("one dissenting view forces the aggregate false") {
        // Unchanged scene; corrupt only the reference direction's queries.
        AnalyticField clean(moved.pre);
        Vec3 surface{-0.35, -0.01, 0.15};  // just inside the crate front face
        Ray sref = aim_at({-0.35, -2.1, 0.2}, surface);
        SingleViewNoiseField noisy(clean, sref.direction, 10.0 * std::numbers::pi / 180.0, 0.9,
                                   123);

        ViewSet five = sample_view_set(SceneMode::Surround, surface, sref, 5, ViewCone{});
        ChangeIndicators perturbed_view =
            per_view_indicators(change_representation(clean, noisy, surface, five.rays[2], window),
                                th);
        CHECK(perturbed_view.v_c);  // the corrupted view alone does fire

        ChangeIndicators agg = detect_change_point(clean, noisy, surface, five, th, window);
        CHECK_FALSE(agg.v_c);
        CHECK_FALSE(agg.v_sigma);

        // Fig. 3 discrimination: the fake change exceeds the threshold in at
        // most one of the five directions.
        int fired = 0;
        for (const Ray& ray : five.rays) {
            ChangeIndicators one =
                per_view_indicators(change_representation(clean, noisy, surface, ray, window), th);
            fired += one.v_c ? 1 : 0;
        }
        CHECK(fired <= 1);
    }
}

TEST_CASE("indicator monotonicity properties") {
    Rng rng(31);

    SUBCASE("raising thresholds never flips false to true") {
        for (int trial = 0; trial < 300; ++trial) {
            ChangeRepresentation rep;
            int n = 1 + static_cast<int>(rng.next_below(8));
            for (int i = 0; i < n; ++i) {
                rep.color_diffs.push_back(rng.uniform(0, 1.2));
                rep.density_diffs.push_back(rng.uniform(0, 80));
            }
            Thresholds lo{rng.uniform(1, 200), rng.uniform(1, 400)};
            Thresholds hi{lo.eps_c + rng.uniform(0, 100), lo.eps_sigma + rng.uniform(0, 200)};
            ChangeIndicators at_lo = per_view_indicators(rep, lo);
            ChangeIndicators at_hi = per_view_indicators(rep, hi);
            if (at_hi.v_c) CHECK(at_lo.v_c);
            if (at_hi.v_sigma) CHECK(at_lo.v_sigma);
        }
    }

    SUBCASE("adding a view never flips the aggregate false to true") {
        ScenePairPreset moved = scene_preset("moved_box");
        AnalyticField a(moved.pre), b(moved.post);
        Thresholds th;
        WindowConfig window = default_window();
        for (int trial = 0; trial < 10; ++trial) {
            Vec3 x{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(0.05, 0.25)};
            Ray ref = aim_at({rng.uniform(-2, 2), -2.0, 0.4}, x);
            ViewSet grown = sample_view_set(SceneMode::Surround, x, ref, 5, ViewCone{});
            ViewSet subset;
            subset.mode = grown.mode;
            subset.rays.assign(grown.rays.begin(), grown.rays.begin() + 3);
            ChangeIndicators small = detect_change_point(a, b, x, subset, th, window);
            ChangeIndicators large = detect_change_point(a, b, x, grown, th, window);
            if (large.v_c) CHECK(small.v_c);
            if (large.v_sigma) CHECK(small.v_sigma);
        }
    }

    SUBCASE("identical fields are (false,false) everywhere") {
        ScenePairPreset preset = scene_preset("unchanged");
        AnalyticField a(preset.pre), b(preset.post);
        WindowConfig window = default_window();
        for (int trial = 0; trial < 20; ++trial) {
            Vec3 x{rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8), rng.uniform(-0.1, 0.4)};
            Ray ref = aim_at({rng.uniform(-2, 2), rng.uniform(-2.5, -1.5), rng.uniform(0, 1)}, x);
            Thresholds th{rng.uniform(1, 180), rng.uniform(1, 600)};
            ViewSet views = sample_view_set(SceneMode::Surround, x, ref,
                                            1 + static_cast<int>(rng.next_below(6)), ViewCone{});
            ChangeIndicators agg = detect_change_point(a, b, x, views, th, window);
            CHECK_FALSE(agg.v_c);
            CHECK_FALSE(agg.v_sigma);
        }
    }
}
