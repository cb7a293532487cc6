#pragma once

#include <vector>

#include "rfcd/camera.hpp"
#include "rfcd/field.hpp"
#include "rfcd/vec.hpp"

namespace rfcd {

/// Decision thresholds. eps_c is quoted in the 0-255 color domain and is
/// divided by 255 before comparison against unit-range sums; eps_sigma is in
/// density units and therefore scales with the scene's density magnitude
/// (the built-in synthetic scenes sit near sigma ~ 8/m, so the default is
/// far below what metrically denser reconstructions would use).
struct Thresholds {
    double eps_c = 60.0;
    double eps_sigma = 0.3;

    void validate() const;
};

/// Boolean change verdicts for color and density.
struct ChangeIndicators {
    bool v_c = false;
    bool v_sigma = false;

    bool any() const { return v_c || v_sigma; }
};

/// Per-sample weighted field differences along one view ray near a point:
/// color_diffs[i] = sum_ch |T_i^a a_i^a c_i^a - T_i^b a_i^b c_i^b| and the
/// density analogue. All entries are nonnegative.
struct ChangeRepresentation {
    std::vector<double> color_diffs;
    std::vector<double> density_diffs;
    Vec3 view;

    double color_norm() const;    // L1 over samples
    double density_norm() const;  // L1 over samples
};

/// Neighborhood sampled around the point along each view ray. Transmittance
/// is accumulated from the ray start, not window-locally, so occluders in
/// front of the point suppress its weights; the prefix is integrated at
/// prefix_spacing_factor times the window spacing.
struct WindowConfig {
    int count = 16;
    double half_width = 0.05;  // meters
    double prefix_spacing_factor = 4.0;

    void validate() const;
};

/// View directions sampled to test direction consistency.
enum class SceneMode { ForwardFacing, Surround };

struct ViewSet {
    std::vector<Ray> rays;  // every ray passes through the probed point
    SceneMode mode = SceneMode::Surround;
};

ChangeRepresentation change_representation(const RadianceField& field_a,
                                           const RadianceField& field_b, const Vec3& x,
                                           const Ray& view_ray, const WindowConfig& window);

/// Thresholded per-view verdicts; strictly greater-than comparisons.
ChangeIndicators per_view_indicators(const ChangeRepresentation& rep, const Thresholds& th);

/// Capture cone of a forward-facing trajectory around the reference
/// direction: a rectangular camera plane subtends different lateral and
/// vertical half-angles, and sampled views must stay inside both so they
/// represent realizable capture viewpoints.
struct ViewCone {
    double lateral = 0.3;   // radians
    double vertical = 0.12;
};

/// Builds V rays through x. Surround mode rotates the reference direction
/// from -90 to +90 degrees about the world vertical axis through x;
/// forward-facing mode spreads directions over the capture cone around the
/// reference. The reference ray's standoff and near/far carry over to every
/// sampled ray.
ViewSet sample_view_set(SceneMode mode, const Vec3& x, const Ray& reference_ray, int v,
                        const ViewCone& cone);

/// Direction-consistent intersection: AND of the per-view indicators.
ChangeIndicators detect_change_point(const RadianceField& field_a, const RadianceField& field_b,
                                     const Vec3& x, const ViewSet& views, const Thresholds& th,
                                     const WindowConfig& window);

}  // namespace rfcd
