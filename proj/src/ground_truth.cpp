#include "rfcd/ground_truth.hpp"

#include <optional>

#include "rfcd/parallel.hpp"
#include "rfcd/volume_render.hpp"

namespace rfcd {

namespace {

// Position of the strongest composite weight, or nullopt if the ray never
// accumulates any opacity in this scene.
std::optional<std::pair<double, Vec3>> first_surface(const SceneSpec& scene, const Ray& ray,
                                                     const RaySamples& samples) {
    std::vector<double> densities(samples.positions.size());
    for (size_t i = 0; i < samples.positions.size(); ++i)
        densities[i] = eval_analytic_field(scene, samples.positions[i], ray.direction).density;
    CompositeWeights cw = composite_weights(densities, samples.deltas);
    size_t best = 0;
    for (size_t i = 1; i < cw.weight.size(); ++i)
        if (cw.weight[i] > cw.weight[best]) best = i;
    if (cw.weight[best] <= 0) return std::nullopt;
    return std::make_pair(samples.t_values[best], samples.positions[best]);
}

}  // namespace

ChangeMap ground_truth_change_mask(const SceneSpec& scene_a, const SceneSpec& scene_b,
                                   const Camera& camera, int k) {
    camera.validate();
    ChangeMap map(camera.width, camera.height);
    parallel_for(static_cast<size_t>(camera.height), [&](size_t row) {
        int y = static_cast<int>(row);
        for (int x = 0; x < camera.width; ++x) {
            Ray ray = pixel_ray(camera, x, y);
            RaySamples samples = sample_ray(ray, k, /*stratified=*/false, 0);
            auto hit_a = first_surface(scene_a, ray, samples);
            auto hit_b = first_surface(scene_b, ray, samples);
            if (!hit_a && !hit_b) continue;  // void in both scenes
            Vec3 center;
            if (hit_a && hit_b)
                center = hit_a->first <= hit_b->first ? hit_a->second : hit_b->second;
            else
                center = hit_a ? hit_a->second : hit_b->second;
            RadianceSample sa = eval_analytic_field(scene_a, center, ray.direction);
            RadianceSample sb = eval_analytic_field(scene_b, center, ray.direction);
            bool changed = max_abs_diff(sa.color, sb.color) > 1e-6 ||
                           std::abs(sa.density - sb.density) > 1e-6;
            map.at(x, y) = changed ? 1 : 0;
        }
    });
    return map;
}

}  // namespace rfcd
