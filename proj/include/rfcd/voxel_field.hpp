#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfcd/camera.hpp"
#include "rfcd/field.hpp"
#include "rfcd/image.hpp"
#include "rfcd/vec.hpp"

namespace rfcd {

/// Dense voxel radiance field. Raw parameters are unconstrained; queries
/// trilinearly interpolate the activated values (softplus density, sigmoid
/// color), so outputs stay valid for any parameter state. Lambertian: the
/// view direction is ignored.
class VoxelGridField final : public RadianceField {
public:
    VoxelGridField() = default;
    VoxelGridField(int nx, int ny, int nz, const Aabb& bounds);

    RadianceSample query(const Vec3& x, const Vec3& d) const override;

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }
    const Aabb& bounds() const { return bounds_; }
    std::size_t node_count() const { return raw_density_.size(); }

    // Raw (pre-activation) parameters, x-fastest; color holds 3 channels per
    // node. Exposed for the trainer and the checkpoint writer.
    std::vector<float>& raw_density() { return raw_density_; }
    std::vector<float>& raw_color() { return raw_color_; }
    const std::vector<float>& raw_density() const { return raw_density_; }
    const std::vector<float>& raw_color() const { return raw_color_; }

    std::size_t node_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * ny_ + j) * nx_ + i;
    }

    void save(const std::string& path) const;
    static VoxelGridField load(const std::string& path);

private:
    int nx_ = 0, ny_ = 0, nz_ = 0;
    Aabb bounds_;
    std::vector<float> raw_density_;
    std::vector<float> raw_color_;
};

double softplus(double x);
double sigmoid(double x);

struct TrainConfig {
    int iterations = 2000;
    double learning_rate = 5e3;
    int rays_per_batch = 4096;
    int samples_per_ray = 96;
    std::uint64_t seed = 0;
    double density_reg = 1e-4;  // mean activated density penalty

    void validate() const;
};

struct TrainResult {
    VoxelGridField field;
    std::vector<double> loss_log;  // one entry per iteration
};

/// Minimizes mean squared photometric error over random ray batches with
/// plain fixed-step SGD; gradients flow through the compositing weights and
/// the trilinear interpolation analytically. Bit-reproducible for a fixed
/// seed. Throws if the loss goes non-finite (message carries the iteration).
TrainResult train(const std::vector<Image>& images, const std::vector<Camera>& cameras,
                  const TrainConfig& config, VoxelGridField init);

/// Analytic parameter gradients of the one-ray photometric loss
/// (1/3) * sum_ch (composite - target)^2; returned as (density, color)
/// buffers aligned with the raw parameter arrays. Test hook.
std::pair<std::vector<double>, std::vector<double>> ray_photometric_gradients(
    const VoxelGridField& field, const Ray& ray, int k, const Vec3& target);

/// Central-finite-difference audit of the analytic gradients of a one-ray
/// photometric loss. Checks `n_params` randomly chosen touched parameters
/// and returns the largest relative error. color_only restricts the audit
/// to color parameters (density held fixed).
double gradient_check(const VoxelGridField& field, const Ray& ray, int k, double epsilon,
                      int n_params = 100, std::uint64_t seed = 0, bool color_only = false);

}  // namespace rfcd
