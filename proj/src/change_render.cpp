#include "rfcd/change_render.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include "rfcd/hash.hpp"
#include "rfcd/parallel.hpp"
#include "rfcd/volume_render.hpp"

namespace rfcd {

namespace {

struct ArgmaxHit {
    double t;
    Vec3 position;
};

std::optional<ArgmaxHit> argmax_weight(const RadianceField& field, const Ray& ray,
                                       const RaySamples& samples) {
    std::vector<double> densities(samples.positions.size());
    for (size_t i = 0; i < samples.positions.size(); ++i)
        densities[i] = field.query(samples.positions[i], ray.direction).density;
    CompositeWeights cw = composite_weights(densities, samples.deltas);
    size_t best = 0;
    for (size_t i = 1; i < cw.weight.size(); ++i)
        if (cw.weight[i] > cw.weight[best]) best = i;
    if (cw.weight[best] <= 0) return std::nullopt;
    return ArgmaxHit{samples.t_values[best], samples.positions[best]};
}

std::string provenance_tag(const Camera& camera, const ChangeRenderConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << camera.width << ' ' << camera.height << ' ' << camera.fx << ' ' << camera.fy << ' '
       << camera.cx << ' ' << camera.cy << ' ' << camera.near << ' ' << camera.far;
    for (double v : camera.pose.rotation.m) os << ' ' << v;
    os << ' ' << camera.pose.translation << ' ' << cfg.thresholds.eps_c << ' '
       << cfg.thresholds.eps_sigma << ' ' << static_cast<int>(cfg.mode) << ' ' << cfg.views << ' '
       << cfg.cone.lateral << ' ' << cfg.cone.vertical << ' ' << cfg.window_count << ' '
       << cfg.window_half_width_factor << ' ' << cfg.samples_per_ray;
    return fnv1a_hex(os.str());
}

}  // namespace

std::optional<Vec3> select_center_point(const RadianceField& field_a, const RadianceField& field_b,
                                        const Ray& ray, int k) {
    RaySamples samples = sample_ray(ray, k, /*stratified=*/false, 0);
    auto hit_a = argmax_weight(field_a, ray, samples);
    auto hit_b = argmax_weight(field_b, ray, samples);
    if (!hit_a && !hit_b) return std::nullopt;
    if (hit_a && hit_b) return hit_a->t <= hit_b->t ? hit_a->position : hit_b->position;
    return hit_a ? hit_a->position : hit_b->position;
}

ChangeMap render_change_map(const RadianceField& field_a, const RadianceField& field_b,
                            const Camera& camera, const ChangeRenderConfig& config) {
    camera.validate();
    config.thresholds.validate();

    WindowConfig window;
    window.count = config.window_count;
    double mean_delta = (camera.far - camera.near) / config.samples_per_ray;
    window.half_width = config.window_half_width_factor * mean_delta;
    window.validate();

    ChangeMap map(camera.width, camera.height);
    map.provenance = provenance_tag(camera, config);

    std::exception_ptr failure;
    std::mutex failure_mutex;
    parallel_for(static_cast<size_t>(camera.height), [&](size_t row) {
        int y = static_cast<int>(row);
        for (int x = 0; x < camera.width; ++x) {
            try {
                Ray ray = pixel_ray(camera, x, y);
                auto center = select_center_point(field_a, field_b, ray, config.samples_per_ray);
                if (!center) continue;  // void in both fields: unchanged

                // Keep the probe window inside [near, far]; surfaces flush
                // against either end only shift the window, never shrink it.
                double t_c = dot(*center - ray.origin, ray.direction);
                t_c = std::min(std::max(t_c, ray.near + window.half_width),
                               ray.far - window.half_width);
                Vec3 probe = ray.at(t_c);

                ViewSet views =
                    sample_view_set(config.mode, probe, ray, config.views, config.cone);
                ChangeIndicators ind =
                    detect_change_point(field_a, field_b, probe, views, config.thresholds, window);
                map.at(x, y) = ind.any() ? 1 : 0;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::make_exception_ptr(std::runtime_error(
                        "pixel (" + std::to_string(x) + ", " + std::to_string(y) +
                        "): " + e.what()));
                return;
            }
        }
    });
    if (failure) std::rethrow_exception(failure);
    return map;
}

ChangeMap naive_change_map(const RadianceField& field_a, const RadianceField& field_b,
                           const Camera& camera, double eps_c_img, int k) {
    Image a = render_image(field_a, camera, k);
    Image b = render_image(field_b, camera, k);
    ChangeMap map(camera.width, camera.height);
    std::ostringstream os;
    os.precision(17);
    os << "naive " << eps_c_img << ' ' << k;
    map.provenance = fnv1a_hex(os.str());
    double eps = eps_c_img / 255.0;
    for (size_t i = 0; i < a.pixels.size(); ++i)
        map.values[i] = l1(a.pixels[i], b.pixels[i]) > eps ? 1 : 0;
    return map;
}

ChangeIndicators naive_point_indicators(const RadianceField& field_a,
                                        const RadianceField& field_b, const Vec3& x, const Vec3& d,
                                        const Thresholds& th) {
    th.validate();
    RadianceSample a = field_a.query(x, d);
    RadianceSample b = field_b.query(x, d);
    return ChangeIndicators{l1(a.color, b.color) > th.eps_c / 255.0,
                            std::abs(a.density - b.density) > th.eps_sigma};
}

}  // namespace rfcd
