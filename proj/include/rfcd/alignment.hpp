#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rfcd/camera.hpp"
#include "rfcd/vec.hpp"

namespace rfcd {

/// x -> scale * R * x + t, with R a proper rotation.
struct SimilarityTransform {
    double scale = 1.0;
    Mat3 rotation;
    Vec3 translation{0, 0, 0};

    Vec3 apply(const Vec3& x) const { return rotation * x * scale + translation; }
    SimilarityTransform inverse() const;
    void validate() const;

    static SimilarityTransform identity() { return {}; }
};

/// Closed-form least-squares similarity from matched point sets:
/// argmin sum || s R a_i + t - b_i ||^2. Requires N >= 3 non-collinear
/// points; planar configurations are fine (reflections are repaired by
/// flipping the smallest singular direction).
SimilarityTransform estimate_similarity(std::span<const Vec3> points_a,
                                        std::span<const Vec3> points_b);

/// Moves the camera center through T and composes the orientation with its
/// rotation; intrinsics are untouched. near/far scale with T.scale so the
/// covered depth range stays geometrically consistent.
Camera apply_to_camera(const SimilarityTransform& t, const Camera& camera);

/// Perturbs all cameras by one random similarity with the given rotation
/// angle (radians) and translation length; returns the perturbed cameras and
/// the exact transform that was applied. magnitude 0 is the identity.
std::pair<std::vector<Camera>, SimilarityTransform> inject_misalignment(
    std::span<const Camera> cameras, std::uint64_t seed, double magnitude);

/// Rotation angle in radians between two rotation matrices.
double rotation_angle_between(const Mat3& a, const Mat3& b);

}  // namespace rfcd
