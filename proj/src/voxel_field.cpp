#include "rfcd/voxel_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "rfcd/parallel.hpp"
#include "rfcd/rng.hpp"
#include "rfcd/volume_render.hpp"

namespace rfcd {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

VoxelGridField::VoxelGridField(int nx, int ny, int nz, const Aabb& bounds)
    : nx_(nx), ny_(ny), nz_(nz), bounds_(bounds) {
    if (nx < 2 || ny < 2 || nz < 2)
        throw std::invalid_argument("voxel grid: need at least 2 nodes per axis");
    Vec3 ext = bounds.extent();
    if (!(ext.x > 0 && ext.y > 0 && ext.z > 0))
        throw std::invalid_argument("voxel grid: empty bounds");
    std::size_t n = static_cast<std::size_t>(nx) * ny * nz;
    // Near-transparent, mid-gray start: raw density -2, raw color 0.
    raw_density_.assign(n, -2.0f);
    raw_color_.assign(3 * n, 0.0f);
}

namespace {

/// Trilinear interpolation stencil at a point: 8 node indices and weights.
struct Stencil {
    std::size_t node[8];
    double weight[8];
};

bool make_stencil(const VoxelGridField& f, const Aabb& bounds, const Vec3& x, Stencil& out) {
    if (!bounds.contains(x)) return false;
    Vec3 ext = bounds.extent();
    double gx = (x.x - bounds.min.x) / ext.x * (f.nx() - 1);
    double gy = (x.y - bounds.min.y) / ext.y * (f.ny() - 1);
    double gz = (x.z - bounds.min.z) / ext.z * (f.nz() - 1);
    int i0 = std::min(static_cast<int>(gx), f.nx() - 2);
    int j0 = std::min(static_cast<int>(gy), f.ny() - 2);
    int k0 = std::min(static_cast<int>(gz), f.nz() - 2);
    double u = gx - i0, v = gy - j0, w = gz - k0;
    int c = 0;
    for (int dk = 0; dk <= 1; ++dk)
        for (int dj = 0; dj <= 1; ++dj)
            for (int di = 0; di <= 1; ++di) {
                out.node[c] = f.node_index(i0 + di, j0 + dj, k0 + dk);
                out.weight[c] = (di ? u : 1 - u) * (dj ? v : 1 - v) * (dk ? w : 1 - w);
                ++c;
            }
    return true;
}

}  // namespace

RadianceSample VoxelGridField::query(const Vec3& x, const Vec3& /*d*/) const {
    Stencil st;
    if (!make_stencil(*this, bounds_, x, st)) return RadianceSample{{0, 0, 0}, 0.0};
    RadianceSample s;
    for (int c = 0; c < 8; ++c) {
        double w = st.weight[c];
        std::size_t n = st.node[c];
        s.density += w * softplus(raw_density_[n]);
        s.color.x += w * sigmoid(raw_color_[3 * n + 0]);
        s.color.y += w * sigmoid(raw_color_[3 * n + 1]);
        s.color.z += w * sigmoid(raw_color_[3 * n + 2]);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Checkpoint format: magic, version, resolution, bounds, then the raw
// parameter arrays (x-fastest) as little-endian 32-bit floats.
// ---------------------------------------------------------------------------

namespace {
constexpr char kMagic[8] = {'R', 'F', 'C', 'D', 'V', 'O', 'X', 'L'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void VoxelGridField::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(kMagic, 8);
    auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    auto put_f64 = [&](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };
    put_u32(kVersion);
    put_u32(static_cast<std::uint32_t>(nx_));
    put_u32(static_cast<std::uint32_t>(ny_));
    put_u32(static_cast<std::uint32_t>(nz_));
    put_f64(bounds_.min.x);
    put_f64(bounds_.min.y);
    put_f64(bounds_.min.z);
    put_f64(bounds_.max.x);
    put_f64(bounds_.max.y);
    put_f64(bounds_.max.z);
    out.write(reinterpret_cast<const char*>(raw_density_.data()),
              static_cast<std::streamsize>(raw_density_.size() * sizeof(float)));
    out.write(reinterpret_cast<const char*>(raw_color_.data()),
              static_cast<std::streamsize>(raw_color_.size() * sizeof(float)));
    if (!out) throw std::runtime_error("short write: " + path);
}

VoxelGridField VoxelGridField::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("not a voxel field checkpoint: " + path);
    auto get_u32 = [&] {
        std::uint32_t v;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    auto get_f64 = [&] {
        double v;
        in.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    std::uint32_t version = get_u32();
    if (version != kVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version) +
                                 " in " + path);
    int nx = static_cast<int>(get_u32());
    int ny = static_cast<int>(get_u32());
    int nz = static_cast<int>(get_u32());
    Aabb bounds;
    bounds.min = {get_f64(), get_f64(), get_f64()};
    bounds.max = {get_f64(), get_f64(), get_f64()};
    VoxelGridField f(nx, ny, nz, bounds);
    in.read(reinterpret_cast<char*>(f.raw_density_.data()),
            static_cast<std::streamsize>(f.raw_density_.size() * sizeof(float)));
    in.read(reinterpret_cast<char*>(f.raw_color_.data()),
            static_cast<std::streamsize>(f.raw_color_.size() * sizeof(float)));
    if (!in) throw std::runtime_error("truncated checkpoint: " + path);
    return f;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
    if (iterations < 0) throw std::invalid_argument("train: negative iteration count");
    if (!(learning_rate > 0)) throw std::invalid_argument("train: nonpositive learning rate");
    if (rays_per_batch < 1) throw std::invalid_argument("train: empty batch");
    if (samples_per_ray < 1) throw std::invalid_argument("train: need samples per ray");
    if (density_reg < 0) throw std::invalid_argument("train: negative regularization");
}

namespace {

/// Per-sample forward state cached for the backward pass.
struct SampleState {
    Stencil stencil;
    double sigma, alpha, transmittance;
    Vec3 color;
    double delta;
    bool inside;
};

/// Forward: composite one ray. Backward: scatter dL/d(raw params) into the
/// dense gradient buffers. Loss per ray is mean squared channel error; the
/// caller divides by the batch size via `scale`.
///
/// d pixel / d sigma_i = delta_i * (T_i (1-alpha_i) c_i - sum_{k>i} w_k c_k)
/// d pixel / d c_i     = T_i alpha_i
double ray_loss_and_grad(const VoxelGridField& f, const RaySamples& samples, const Vec3& target,
                         double scale, double density_reg_per_sample,
                         std::vector<double>* grad_density, std::vector<double>* grad_color) {
    const std::vector<float>& raw_d = f.raw_density();
    const std::vector<float>& raw_c = f.raw_color();
    const size_t k = samples.positions.size();

    std::vector<SampleState> states(k);
    Vec3 composite{0, 0, 0};
    double log_t = 0.0;
    for (size_t i = 0; i < k; ++i) {
        SampleState& st = states[i];
        st.delta = samples.deltas[i];
        st.inside = make_stencil(f, f.bounds(), samples.positions[i], st.stencil);
        st.sigma = 0.0;
        st.color = {0, 0, 0};
        if (st.inside) {
            for (int c = 0; c < 8; ++c) {
                double w = st.stencil.weight[c];
                std::size_t n = st.stencil.node[c];
                st.sigma += w * softplus(raw_d[n]);
                st.color.x += w * sigmoid(raw_c[3 * n + 0]);
                st.color.y += w * sigmoid(raw_c[3 * n + 1]);
                st.color.z += w * sigmoid(raw_c[3 * n + 2]);
            }
        }
        st.transmittance = std::exp(log_t);
        st.alpha = -std::expm1(-st.sigma * st.delta);
        composite += st.color * (st.transmittance * st.alpha);
        log_t -= st.sigma * st.delta;
    }

    Vec3 err = composite - target;
    double loss = dot(err, err) / 3.0;
    if (!grad_density) return loss;

    Vec3 g_pixel = err * (2.0 / 3.0 * scale);  // dL/d composite, batch-scaled
    Vec3 suffix{0, 0, 0};                      // sum_{k>i} w_k c_k
    for (size_t ii = k; ii-- > 0;) {
        const SampleState& st = states[ii];
        if (!st.inside) continue;
        double w_i = st.transmittance * st.alpha;

        Vec3 dpix_dsigma = (st.color * (st.transmittance * (1.0 - st.alpha)) - suffix) * st.delta;
        double g_sigma = dot(g_pixel, dpix_dsigma) + density_reg_per_sample;
        Vec3 g_color = g_pixel * w_i;

        for (int c = 0; c < 8; ++c) {
            double w = st.stencil.weight[c];
            std::size_t n = st.stencil.node[c];
            (*grad_density)[n] += g_sigma * w * sigmoid(raw_d[n]);  // softplus' = sigmoid
            double s0 = sigmoid(raw_c[3 * n + 0]);
            double s1 = sigmoid(raw_c[3 * n + 1]);
            double s2 = sigmoid(raw_c[3 * n + 2]);
            (*grad_color)[3 * n + 0] += g_color.x * w * s0 * (1 - s0);
            (*grad_color)[3 * n + 1] += g_color.y * w * s1 * (1 - s1);
            (*grad_color)[3 * n + 2] += g_color.z * w * s2 * (1 - s2);
        }
        suffix += st.color * w_i;
    }
    return loss;
}

}  // namespace

TrainResult train(const std::vector<Image>& images, const std::vector<Camera>& cameras,
                  const TrainConfig& config, VoxelGridField init) {
    config.validate();
    if (images.empty() || images.size() != cameras.size())
        throw std::invalid_argument("train: need matching nonempty images and cameras");
    for (size_t v = 0; v < images.size(); ++v) {
        cameras[v].validate();
        if (images[v].width != cameras[v].width || images[v].height != cameras[v].height)
            throw std::invalid_argument("train: image/camera size mismatch at view " +
                                        std::to_string(v));
    }

    TrainResult result{std::move(init), {}};
    result.loss_log.reserve(static_cast<size_t>(config.iterations));
    VoxelGridField& field = result.field;

    // Gradients accumulate into a fixed number of slots (not one per worker)
    // so the result is identical for any thread count.
    constexpr unsigned kSlots = 8;
    std::vector<std::vector<double>> grad_d(kSlots), grad_c(kSlots);
    for (unsigned t = 0; t < kSlots; ++t) {
        grad_d[t].assign(field.node_count(), 0.0);
        grad_c[t].assign(3 * field.node_count(), 0.0);
    }
    std::vector<double> loss_parts(kSlots);

    Rng batch_rng(config.seed);
    const int batch = config.rays_per_batch;
    const double scale = 1.0 / batch;
    const double reg_per_sample = config.density_reg / (batch * config.samples_per_ray);

    struct RayTask {
        Ray ray;
        Vec3 target;
        std::uint64_t jitter_seed;
    };
    std::vector<RayTask> tasks(static_cast<size_t>(batch));

    for (int iter = 0; iter < config.iterations; ++iter) {
        // Draw the batch on one stream so the worker count cannot change it.
        for (int r = 0; r < batch; ++r) {
            size_t view = static_cast<size_t>(batch_rng.next_below(images.size()));
            const Camera& cam = cameras[view];
            int px = static_cast<int>(batch_rng.next_below(static_cast<std::uint64_t>(cam.width)));
            int py = static_cast<int>(batch_rng.next_below(static_cast<std::uint64_t>(cam.height)));
            tasks[r] = RayTask{pixel_ray(cam, px, py), images[view].at(px, py),
                               batch_rng.next_u64()};
        }

        std::fill(loss_parts.begin(), loss_parts.end(), 0.0);
        parallel_for(kSlots, [&](size_t t) {
            std::vector<double>& gd = grad_d[t];
            std::vector<double>& gc = grad_c[t];
            std::fill(gd.begin(), gd.end(), 0.0);
            std::fill(gc.begin(), gc.end(), 0.0);
            size_t chunk = (tasks.size() + kSlots - 1) / kSlots;
            size_t lo = t * chunk, hi = std::min(tasks.size(), lo + chunk);
            for (size_t r = lo; r < hi; ++r) {
                RaySamples samples = sample_ray(tasks[r].ray, config.samples_per_ray,
                                                /*stratified=*/true, tasks[r].jitter_seed);
                loss_parts[t] += ray_loss_and_grad(field, samples, tasks[r].target, scale,
                                                   reg_per_sample, &gd, &gc);
            }
        });

        double loss = 0.0;
        for (unsigned t = 0; t < kSlots; ++t) loss += loss_parts[t];
        loss *= scale;
        if (!std::isfinite(loss))
            throw std::runtime_error("train: non-finite loss at iteration " + std::to_string(iter));
        result.loss_log.push_back(loss);

        // Reduce slot gradients in fixed order, then step.
        std::vector<float>& raw_d = field.raw_density();
        std::vector<float>& raw_c = field.raw_color();
        for (std::size_t n = 0; n < raw_d.size(); ++n) {
            double g = 0.0;
            for (unsigned t = 0; t < kSlots; ++t) g += grad_d[t][n];
            raw_d[n] = static_cast<float>(raw_d[n] - config.learning_rate * g);
        }
        for (std::size_t n = 0; n < raw_c.size(); ++n) {
            double g = 0.0;
            for (unsigned t = 0; t < kSlots; ++t) g += grad_c[t][n];
            raw_c[n] = static_cast<float>(raw_c[n] - config.learning_rate * g);
        }
    }
    return result;
}

std::pair<std::vector<double>, std::vector<double>> ray_photometric_gradients(
    const VoxelGridField& field, const Ray& ray, int k, const Vec3& target) {
    RaySamples samples = sample_ray(ray, k, /*stratified=*/false, 0);
    std::vector<double> grad_d(field.node_count(), 0.0), grad_c(3 * field.node_count(), 0.0);
    ray_loss_and_grad(field, samples, target, 1.0, 0.0, &grad_d, &grad_c);
    return {std::move(grad_d), std::move(grad_c)};
}

double gradient_check(const VoxelGridField& field, const Ray& ray, int k, double epsilon,
                      int n_params, std::uint64_t seed, bool color_only) {
    if (!(epsilon > 0)) throw std::invalid_argument("gradient_check: epsilon must be positive");
    VoxelGridField f = field;  // local copy; parameters get perturbed in place
    RaySamples samples = sample_ray(ray, k, /*stratified=*/false, 0);
    const Vec3 target{0.25, 0.5, 0.75};  // arbitrary fixed photometric target

    std::vector<double> grad_d(f.node_count(), 0.0), grad_c(3 * f.node_count(), 0.0);
    ray_loss_and_grad(f, samples, target, 1.0, 0.0, &grad_d, &grad_c);

    // Candidate parameters: anything the ray actually touched.
    std::vector<std::pair<bool, std::size_t>> touched;  // (is_density, index)
    if (!color_only) {
        for (std::size_t i = 0; i < grad_d.size(); ++i)
            if (grad_d[i] != 0.0) touched.emplace_back(true, i);
    }
    for (std::size_t i = 0; i < grad_c.size(); ++i)
        if (grad_c[i] != 0.0) touched.emplace_back(false, i);
    if (touched.empty()) return 0.0;

    Rng rng(seed);
    double worst = 0.0;
    int checks = std::min<std::size_t>(static_cast<std::size_t>(n_params), touched.size());
    for (int c = 0; c < checks; ++c) {
        auto [is_density, idx] = touched[rng.next_below(touched.size())];
        std::vector<float>& params = is_density ? f.raw_density() : f.raw_color();
        double analytic = is_density ? grad_d[idx] : grad_c[idx];

        float original = params[idx];
        params[idx] = static_cast<float>(original + epsilon);
        double hi = static_cast<double>(params[idx]);
        double loss_hi = ray_loss_and_grad(f, samples, target, 1.0, 0.0, nullptr, nullptr);
        params[idx] = static_cast<float>(original - epsilon);
        double lo = static_cast<double>(params[idx]);
        double loss_lo = ray_loss_and_grad(f, samples, target, 1.0, 0.0, nullptr, nullptr);
        params[idx] = original;

        // Divide by the step the float parameters actually took.
        double fd = (loss_hi - loss_lo) / (hi - lo);
        double rel = std::abs(analytic - fd) / std::max({std::abs(analytic), std::abs(fd), 1e-12});
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace rfcd
