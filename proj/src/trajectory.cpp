#include "rfcd/trajectory.hpp"

#include <cmath>
#include <numbers>
#include <utility>
#include <stdexcept>

#include "rfcd/rng.hpp"

namespace rfcd {

namespace {

Camera camera_at(const TrajectorySpec& spec, const Vec3& eye) {
    Camera cam;
    cam.width = spec.image_width;
    cam.height = spec.image_height;
    cam.fx = cam.fy = spec.focal_px;
    cam.cx = spec.image_width / 2.0;
    cam.cy = spec.image_height / 2.0;
    cam.near = spec.near;
    cam.far = spec.far;
    cam.pose = look_at(eye, spec.center);
    cam.validate();
    return cam;
}

}  // namespace

std::vector<Camera> make_trajectory(const TrajectorySpec& spec) {
    std::vector<Camera> cams;
    Rng rng(spec.seed);
    auto jitter = [&]() -> Vec3 {
        if (spec.jitter <= 0) return {0, 0, 0};
        return {rng.uniform(-spec.jitter, spec.jitter), rng.uniform(-spec.jitter, spec.jitter),
                rng.uniform(-spec.jitter, spec.jitter)};
    };

    if (spec.mode == TrajectorySpec::Mode::Surround) {
        if (spec.per_circle < 2) throw std::invalid_argument("trajectory: need >= 2 positions per circle");
        if (!(spec.radius > 0)) throw std::invalid_argument("trajectory: zero circle radius");
        cams.reserve(static_cast<size_t>(3) * spec.per_circle);
        for (double height : spec.circle_heights) {
            for (int i = 0; i < spec.per_circle; ++i) {
                double angle = 2.0 * std::numbers::pi * i / spec.per_circle;
                Vec3 eye = spec.center +
                           Vec3{spec.radius * std::cos(angle), spec.radius * std::sin(angle), height} +
                           jitter();
                cams.push_back(camera_at(spec, eye));
            }
        }
        return cams;
    }

    // Forward-facing zig-zag: serpentine walk over a grid on the plane
    // y = center.y - standoff.
    if (spec.count < 2) throw std::invalid_argument("trajectory: need >= 2 positions");
    if (!(spec.standoff > 0)) throw std::invalid_argument("trajectory: zero standoff");
    int rows = std::max(2, static_cast<int>(std::lround(std::sqrt(spec.count / 2.0))));
    int cols = (spec.count + rows - 1) / rows;
    cams.reserve(static_cast<size_t>(spec.count));
    for (int i = 0; i < spec.count; ++i) {
        int r = i / cols;
        int c = i % cols;
        if (r % 2 == 1) c = cols - 1 - c;  // zig-zag
        double fx = cols > 1 ? static_cast<double>(c) / (cols - 1) : 0.5;
        double fz = rows > 1 ? static_cast<double>(r) / (rows - 1) : 0.5;
        Vec3 eye = spec.center +
                   Vec3{(2 * fx - 1) * spec.plane_half_width, -spec.standoff,
                        spec.plane_z_offset + (2 * fz - 1) * spec.plane_half_height} +
                   jitter();
        cams.push_back(camera_at(spec, eye));
    }
    return cams;
}

std::pair<double, double> trajectory_cone_half_angles(const TrajectorySpec& spec) {
    if (spec.mode == TrajectorySpec::Mode::Surround) {
        // The +/-90 degree rotation rule covers surround scenes instead.
        return {std::numbers::pi / 2.0, std::numbers::pi / 2.0};
    }
    return {std::atan2(spec.plane_half_width + spec.jitter, spec.standoff),
            std::atan2(spec.plane_half_height + spec.jitter, spec.standoff)};
}

}  // namespace rfcd
