#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rfcd/camera.hpp"
#include "rfcd/field.hpp"
#include "rfcd/image.hpp"

namespace rfcd {

/// K points along a ray with their distances and spacings.
struct RaySamples {
    std::vector<Vec3> positions;
    std::vector<double> t_values;  // strictly increasing
    std::vector<double> deltas;    // deltas[i] = t[i+1] - t[i]; last repeats the previous
};

/// Per-sample transmittance, alpha, and composite weights T_i * alpha_i.
struct CompositeWeights {
    std::vector<double> transmittance;  // T_1 = 1, non-increasing
    std::vector<double> alpha;          // in [0, 1)
    std::vector<double> weight;         // sums to <= 1
};

/// Place K samples in [near, far]. Midpoint mode uses bin centers; stratified
/// mode jitters one sample per bin, deterministically from `seed`.
RaySamples sample_ray(const Ray& ray, int k, bool stratified, std::uint64_t seed);

/// Emission-absorption weights: T_i = exp(-sum_{j<i} sigma_j delta_j),
/// alpha_i = 1 - exp(-sigma_i delta_i), w_i = T_i alpha_i.
CompositeWeights composite_weights(std::span<const double> densities,
                                   std::span<const double> deltas);

/// Composited pixel color sum(w_i c_i), channels clamped to [0,1].
/// Uses midpoint sampling so rendering is deterministic.
Vec3 render_pixel(const RadianceField& field, const Ray& ray, int k);

/// Renders every pixel; parallel over rows, bit-identical to the serial order.
Image render_image(const RadianceField& field, const Camera& camera, int k);

}  // namespace rfcd
