#include "rfcd/volume_render.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "rfcd/parallel.hpp"
#include "rfcd/rng.hpp"

namespace rfcd {

RaySamples sample_ray(const Ray& ray, int k, bool stratified, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("sample_ray: need at least one sample");
    if (!(ray.near >= 0) || !(ray.near < ray.far))
        throw std::invalid_argument("sample_ray: need 0 <= near < far");

    const double bin = (ray.far - ray.near) / k;
    RaySamples s;
    s.t_values.resize(k);
    s.positions.resize(k);
    s.deltas.resize(k);

    if (stratified) {
        Rng rng(seed);
        for (int i = 0; i < k; ++i) s.t_values[i] = ray.near + (i + rng.next_double()) * bin;
    } else {
        for (int i = 0; i < k; ++i) s.t_values[i] = ray.near + (i + 0.5) * bin;
    }
    for (int i = 0; i < k; ++i) s.positions[i] = ray.at(s.t_values[i]);
    for (int i = 0; i + 1 < k; ++i) s.deltas[i] = s.t_values[i + 1] - s.t_values[i];
    // The spec of the spacing list leaves the last entry open; repeating the
    // previous spacing keeps all weights finite. A single sample covers the
    // whole interval.
    s.deltas[k - 1] = k >= 2 ? s.deltas[k - 2] : (ray.far - ray.near);
    return s;
}

CompositeWeights composite_weights(std::span<const double> densities,
                                   std::span<const double> deltas) {
    if (densities.size() != deltas.size())
        throw std::invalid_argument("composite_weights: size mismatch");
    const size_t k = densities.size();
    CompositeWeights cw;
    cw.transmittance.resize(k);
    cw.alpha.resize(k);
    cw.weight.resize(k);

    double log_t = 0.0;  // accumulate in log space: T_i = exp(-sum sigma_j delta_j)
    for (size_t i = 0; i < k; ++i) {
        if (densities[i] < 0) throw std::invalid_argument("composite_weights: negative density");
        if (!(deltas[i] > 0)) throw std::invalid_argument("composite_weights: nonpositive delta");
        cw.transmittance[i] = std::exp(log_t);
        cw.alpha[i] = -std::expm1(-densities[i] * deltas[i]);
        cw.weight[i] = cw.transmittance[i] * cw.alpha[i];
        log_t -= densities[i] * deltas[i];
    }
    return cw;
}

Vec3 render_pixel(const RadianceField& field, const Ray& ray, int k) {
    RaySamples samples = sample_ray(ray, k, /*stratified=*/false, 0);
    std::vector<double> densities(samples.positions.size());
    std::vector<Vec3> colors(samples.positions.size());
    for (size_t i = 0; i < samples.positions.size(); ++i) {
        RadianceSample rs = field.query(samples.positions[i], ray.direction);
        densities[i] = rs.density;
        colors[i] = rs.color;
    }
    CompositeWeights cw = composite_weights(densities, samples.deltas);
    Vec3 out{0, 0, 0};
    for (size_t i = 0; i < colors.size(); ++i) out += colors[i] * cw.weight[i];
    return clamp01(out);
}

Image render_image(const RadianceField& field, const Camera& camera, int k) {
    camera.validate();
    Image img(camera.width, camera.height);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    parallel_for(static_cast<size_t>(camera.height), [&](size_t row) {
        for (int x = 0; x < camera.width; ++x) {
            try {
                img.at(x, static_cast<int>(row)) =
                    render_pixel(field, pixel_ray(camera, x, static_cast<int>(row)), k);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::make_exception_ptr(std::runtime_error(
                        "pixel (" + std::to_string(x) + ", " + std::to_string(row) +
                        "): " + e.what()));
                return;
            }
        }
    });
    if (failure) std::rethrow_exception(failure);
    return img;
}

}  // namespace rfcd
