#pragma once

#include <optional>

#include "rfcd/camera.hpp"
#include "rfcd/change_detect.hpp"
#include "rfcd/field.hpp"
#include "rfcd/image.hpp"

namespace rfcd {

/// Everything the change-map renderer needs beyond the two fields and the
/// camera. window_half_width_factor scales the ray's mean sample spacing
/// into the probe window half-width.
struct ChangeRenderConfig {
    Thresholds thresholds;
    SceneMode mode = SceneMode::Surround;
    int views = 5;
    ViewCone cone;  // forward-facing only
    int window_count = 16;
    double window_half_width_factor = 2.0;
    int samples_per_ray = 128;
};

/// First-hit surface point for a pixel ray: the per-field argmax composite
/// weight, nearer of the two. A field whose weights are all zero contributes
/// no candidate; nullopt means the ray is empty in both fields.
std::optional<Vec3> select_center_point(const RadianceField& field_a, const RadianceField& field_b,
                                        const Ray& ray, int k);

/// Binary change map under an arbitrary camera: per pixel, center point,
/// view set, direction-consistent indicators, then v_c OR v_sigma. Empty
/// rays render unchanged. Deterministic and pixel-order independent.
ChangeMap render_change_map(const RadianceField& field_a, const RadianceField& field_b,
                            const Camera& camera, const ChangeRenderConfig& config);

/// Naive image-difference baseline: renders both fields under the same
/// camera and thresholds the channel-summed absolute pixel difference.
/// eps_c_img is quoted in the 0-255 domain. Works (badly, which is the
/// point) on misaligned fields.
ChangeMap naive_change_map(const RadianceField& field_a, const RadianceField& field_b,
                           const Camera& camera, double eps_c_img, int k);

/// Pointwise naive solution: single-point, single-view thresholded
/// differences of direct field queries.
ChangeIndicators naive_point_indicators(const RadianceField& field_a,
                                        const RadianceField& field_b, const Vec3& x, const Vec3& d,
                                        const Thresholds& th);

}  // namespace rfcd
