#pragma once

#include <cstdint>
#include <vector>

#include "rfcd/camera.hpp"

namespace rfcd {

/// Capture trajectory description. Forward-facing mode walks a zig-zag grid
/// on a vertical plane facing the scene center; surround mode places three
/// horizontal circles (lower, middle, upper), every camera aimed at the
/// center.
struct TrajectorySpec {
    enum class Mode { ForwardFacing, Surround };

    Mode mode = Mode::Surround;
    Vec3 center{0, 0, 0};

    // surround
    int per_circle = 40;
    double radius = 2.0;
    double circle_heights[3] = {0.1, 0.45, 0.8};  // relative to center.z

    // forward-facing
    int count = 20;
    double standoff = 2.2;        // camera plane distance from center along -y
    double plane_half_width = 0.7;
    double plane_half_height = 0.35;
    double plane_z_offset = 0.0;  // vertical shift of the capture plane

    double jitter = 0.0;  // uniform positional jitter amplitude (meters)
    std::uint64_t seed = 0;

    // intrinsics applied to every generated camera
    int image_width = 252;
    int image_height = 189;
    double focal_px = 260.0;  // fx = fy
    double near = 0.3;
    double far = 6.0;

    int camera_count() const {
        return mode == Mode::Surround ? 3 * per_circle : count;
    }
};

/// Deterministic given the seed. Every returned camera satisfies the Camera
/// invariants and its optical axis passes through spec.center.
std::vector<Camera> make_trajectory(const TrajectorySpec& spec);

/// Half-angles (lateral, vertical) of the cone spanned by the trajectory's
/// viewing directions toward the scene center; forward-facing view sampling
/// draws from it.
std::pair<double, double> trajectory_cone_half_angles(const TrajectorySpec& spec);

}  // namespace rfcd
