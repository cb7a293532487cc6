#include "rfcd/scene.hpp"

#include <cmath>
#include <stdexcept>

namespace rfcd {

bool Primitive::contains(const Vec3& x) const {
    if (shape == Shape::Box) {
        return std::abs(x.x - center.x) <= half_extents.x &&
               std::abs(x.y - center.y) <= half_extents.y &&
               std::abs(x.z - center.z) <= half_extents.z;
    }
    return norm_sq(x - center) <= radius * radius;
}

Vec3 Primitive::color_at(const Vec3& x) const {
    if (!checker) return color;
    double cell = checker_cell;
    if (cell <= 0) {
        double smallest = shape == Shape::Box
                              ? std::min({half_extents.x, half_extents.y, half_extents.z}) * 2.0
                              : radius * 2.0;
        cell = smallest / 8.0;
    }
    Vec3 local = x - center;
    long long ix = static_cast<long long>(std::floor(local.x / cell));
    long long iy = static_cast<long long>(std::floor(local.y / cell));
    long long iz = static_cast<long long>(std::floor(local.z / cell));
    return ((ix + iy + iz) & 1) ? checker_color : color;
}

void Primitive::validate() const {
    if (density < 0) throw std::invalid_argument("primitive " + id + ": negative density");
    if (shape == Shape::Box) {
        if (!(half_extents.x > 0 && half_extents.y > 0 && half_extents.z > 0))
            throw std::invalid_argument("primitive " + id + ": nonpositive extents");
    } else if (!(radius > 0)) {
        throw std::invalid_argument("primitive " + id + ": nonpositive radius");
    }
}

const Primitive* SceneSpec::find(const std::string& id) const {
    for (const auto& p : primitives)
        if (p.id == id) return &p;
    return nullptr;
}

void SceneSpec::validate() const {
    if (background_density < 0) throw std::invalid_argument("scene: negative background density");
    for (const auto& p : primitives) {
        p.validate();
        Vec3 lo, hi;
        if (p.shape == Primitive::Shape::Box) {
            lo = p.center - p.half_extents;
            hi = p.center + p.half_extents;
        } else {
            lo = p.center - Vec3{p.radius, p.radius, p.radius};
            hi = p.center + Vec3{p.radius, p.radius, p.radius};
        }
        if (!bounds.contains(lo) || !bounds.contains(hi))
            throw std::invalid_argument("primitive " + p.id + " extends outside scene bounds");
    }
}

SceneSpec apply_edit(const SceneSpec& scene, const SceneEdit& edit) {
    SceneSpec out = scene;
    auto require_target = [&]() -> Primitive& {
        for (auto& p : out.primitives)
            if (p.id == edit.target) return p;
        throw std::invalid_argument("scene edit: no primitive with id '" + edit.target + "'");
    };

    switch (edit.op) {
        case SceneEdit::Op::Move:
            require_target().center += edit.translation;
            break;
        case SceneEdit::Op::Recolor:
            require_target().color = edit.new_color;
            break;
        case SceneEdit::Op::Add:
            edit.new_primitive.validate();
            out.primitives.push_back(edit.new_primitive);
            break;
        case SceneEdit::Op::Remove: {
            require_target();
            std::erase_if(out.primitives, [&](const Primitive& p) { return p.id == edit.target; });
            break;
        }
    }
    out.validate();
    return out;
}

AnalyticField::AnalyticField(SceneSpec scene) : scene_(std::move(scene)) {
    scene_.validate();
}

RadianceSample AnalyticField::query(const Vec3& x, const Vec3& d) const {
    return eval_analytic_field(scene_, x, d);
}

RadianceSample eval_analytic_field(const SceneSpec& scene, const Vec3& x, const Vec3& /*d*/) {
    if (!scene.bounds.contains(x)) return RadianceSample{{0, 0, 0}, scene.background_density};
    // Later primitives win: scan back to front.
    for (auto it = scene.primitives.rbegin(); it != scene.primitives.rend(); ++it) {
        if (it->contains(x)) return RadianceSample{it->color_at(x), it->density};
    }
    return RadianceSample{{0, 0, 0}, scene.background_density};
}

}  // namespace rfcd
