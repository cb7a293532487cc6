#pragma once

#include <optional>
#include <stdexcept>

#include "rfcd/vec.hpp"

namespace rfcd {

/// Rigid world-from-camera transform. `rotation` columns are the camera's
/// local x/y/z axes in world coordinates, `translation` is the camera center.
struct Pose {
    Mat3 rotation;
    Vec3 translation;
};

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit length
    double near = 0.0;
    double far = 1.0;

    Vec3 at(double t) const { return origin + direction * t; }
};

/// Pinhole camera. Right-handed local frame: x right, y up, looking down -z.
/// Pixel (u, v) indexes from the top-left corner; v grows downward.
struct Camera {
    int width = 0;
    int height = 0;
    double fx = 0, fy = 0;
    double cx = 0, cy = 0;
    Pose pose;
    double near = 0.01;
    double far = 100.0;

    Vec3 center() const { return pose.translation; }
    Vec3 optical_axis() const { return -pose.rotation.col(2); }

    void validate() const {
        if (width <= 0 || height <= 0) throw std::invalid_argument("camera: empty image plane");
        if (fx <= 0 || fy <= 0) throw std::invalid_argument("camera: focal length must be positive");
        if (cx <= 0 || cx >= width || cy <= 0 || cy >= height)
            throw std::invalid_argument("camera: principal point outside image");
        if (orthonormality_error(pose.rotation) > 1e-9 || pose.rotation.det() < 0)
            throw std::invalid_argument("camera: rotation is not a proper orthonormal matrix");
        if (!(near >= 0) || !(near < far)) throw std::invalid_argument("camera: need 0 <= near < far");
    }
};

/// Ray through a continuous pixel coordinate (u right, v down), world frame.
inline Ray ray_through(const Camera& cam, double u, double v) {
    Vec3 dir_cam{(u - cam.cx) / cam.fx, -(v - cam.cy) / cam.fy, -1.0};
    return Ray{cam.center(), normalized(cam.pose.rotation * dir_cam), cam.near, cam.far};
}

/// Ray through the center of integer pixel p = (px, py).
inline Ray pixel_ray(const Camera& cam, int px, int py) {
    if (px < 0 || px >= cam.width || py < 0 || py >= cam.height)
        throw std::invalid_argument("pixel_ray: pixel outside image bounds");
    return ray_through(cam, px + 0.5, py + 0.5);
}

/// Project a world point to continuous pixel coordinates.
/// Returns nullopt for points at or behind the camera plane.
inline std::optional<std::pair<double, double>> project(const Camera& cam, const Vec3& world) {
    Vec3 p = cam.pose.rotation.t_mul(world - cam.center());
    if (p.z >= -1e-12) return std::nullopt;  // camera looks down -z
    double u = cam.cx + cam.fx * (p.x / -p.z);
    double v = cam.cy - cam.fy * (p.y / -p.z);
    return std::make_pair(u, v);
}

/// Camera at `eye` aimed at `target`, world +z treated as up.
inline Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up = {0, 0, 1}) {
    Vec3 forward = normalized(target - eye);
    Vec3 up_ref = up;
    if (std::abs(dot(forward, normalized(up_ref))) > 1.0 - 1e-9) up_ref = {0, 1, 0};
    Vec3 x_cam = normalized(cross(forward, up_ref));
    Vec3 z_cam = -forward;
    Vec3 y_cam = cross(z_cam, x_cam);
    return Pose{Mat3::from_cols(x_cam, y_cam, z_cam), eye};
}

}  // namespace rfcd
