#include "rfcd/alignment.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "rfcd/rng.hpp"

namespace rfcd {

SimilarityTransform SimilarityTransform::inverse() const {
    SimilarityTransform inv;
    inv.scale = 1.0 / scale;
    inv.rotation = rotation.transposed();
    inv.translation = inv.rotation * translation * (-inv.scale);
    return inv;
}

void SimilarityTransform::validate() const {
    if (!(scale > 0)) throw std::invalid_argument("similarity: scale must be positive");
    if (orthonormality_error(rotation) > 1e-9 || rotation.det() < 0)
        throw std::invalid_argument("similarity: rotation is not a proper rotation");
}

SimilarityTransform estimate_similarity(std::span<const Vec3> points_a,
                                        std::span<const Vec3> points_b) {
    const size_t n = points_a.size();
    if (n != points_b.size()) throw std::invalid_argument("estimate_similarity: size mismatch");
    if (n < 3) throw std::invalid_argument("estimate_similarity: need at least 3 correspondences");

    Eigen::Vector3d mean_a = Eigen::Vector3d::Zero(), mean_b = Eigen::Vector3d::Zero();
    for (size_t i = 0; i < n; ++i) {
        mean_a += Eigen::Vector3d(points_a[i].x, points_a[i].y, points_a[i].z);
        mean_b += Eigen::Vector3d(points_b[i].x, points_b[i].y, points_b[i].z);
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();  // cross-covariance of b against a
    double var_a = 0.0;
    for (size_t i = 0; i < n; ++i) {
        Eigen::Vector3d da = Eigen::Vector3d(points_a[i].x, points_a[i].y, points_a[i].z) - mean_a;
        Eigen::Vector3d db = Eigen::Vector3d(points_b[i].x, points_b[i].y, points_b[i].z) - mean_b;
        cov += db * da.transpose();
        var_a += da.squaredNorm();
    }
    cov /= static_cast<double>(n);
    var_a /= static_cast<double>(n);

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Vector3d sv = svd.singularValues();
    // Collinear inputs leave a two-dimensional rotation ambiguity.
    if (sv(1) <= 1e-12 * std::max(sv(0), 1e-300))
        throw std::invalid_argument("estimate_similarity: degenerate (collinear) points");

    Eigen::Vector3d d = Eigen::Vector3d::Ones();
    if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0) d(2) = -1;
    Eigen::Matrix3d rot = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();

    if (!(var_a > 0)) throw std::invalid_argument("estimate_similarity: coincident source points");
    double scale = (sv(0) * d(0) + sv(1) * d(1) + sv(2) * d(2)) / var_a;
    if (!(scale > 0)) throw std::invalid_argument("estimate_similarity: nonpositive scale solution");
    Eigen::Vector3d t = mean_b - scale * rot * mean_a;

    SimilarityTransform out;
    out.scale = scale;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out.rotation(r, c) = rot(r, c);
    out.translation = {t(0), t(1), t(2)};
    return out;
}

Camera apply_to_camera(const SimilarityTransform& t, const Camera& camera) {
    Camera out = camera;
    out.pose.translation = t.apply(camera.pose.translation);
    out.pose.rotation = t.rotation * camera.pose.rotation;
    out.near = camera.near * t.scale;
    out.far = camera.far * t.scale;
    return out;
}

std::pair<std::vector<Camera>, SimilarityTransform> inject_misalignment(
    std::span<const Camera> cameras, std::uint64_t seed, double magnitude) {
    SimilarityTransform t;
    if (magnitude > 0) {
        Rng rng(seed);
        // Random unit axis via rejection sampling from the cube.
        Vec3 axis;
        do {
            axis = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        } while (norm_sq(axis) > 1.0 || norm_sq(axis) < 1e-6);
        axis = normalized(axis);
        t.rotation = axis_angle(axis, magnitude);
        Vec3 dir;
        do {
            dir = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        } while (norm_sq(dir) > 1.0 || norm_sq(dir) < 1e-6);
        t.translation = normalized(dir) * magnitude;
    }
    std::vector<Camera> out;
    out.reserve(cameras.size());
    for (const Camera& cam : cameras) out.push_back(apply_to_camera(t, cam));
    return {std::move(out), t};
}

double rotation_angle_between(const Mat3& a, const Mat3& b) {
    Mat3 rel = a.transposed() * b;
    double trace = rel(0, 0) + rel(1, 1) + rel(2, 2);
    // atan2 of the skew part keeps full precision near zero, where acos of
    // the trace loses half the significant digits.
    Vec3 skew{rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1)};
    return std::atan2(0.5 * norm(skew), 0.5 * (trace - 1.0));
}

}  // namespace rfcd
