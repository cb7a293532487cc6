#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rfcd/field.hpp"
#include "rfcd/vec.hpp"

namespace rfcd {

/// Analytic solid: axis-aligned box (center + half extents) or sphere
/// (center + radius). Color is flat or a two-color 3D checker.
struct Primitive {
    enum class Shape { Box, Sphere };

    std::string id;
    Shape shape = Shape::Box;
    Vec3 center{0, 0, 0};
    Vec3 half_extents{0.1, 0.1, 0.1};  // boxes
    double radius = 0.1;               // spheres
    Vec3 color{1, 1, 1};
    double density = 50.0;

    bool checker = false;
    Vec3 checker_color{0, 0, 0};
    double checker_cell = 0.0;  // 0 = derive as 1/8 of the smallest extent

    bool contains(const Vec3& x) const;
    Vec3 color_at(const Vec3& x) const;
    void validate() const;
};

struct SceneSpec {
    std::vector<Primitive> primitives;  // later entries win inside overlaps
    double background_density = 0.0;
    Aabb bounds{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}};

    const Primitive* find(const std::string& id) const;
    void validate() const;
};

/// One object-level change between the two captures.
struct SceneEdit {
    enum class Op { Move, Recolor, Add, Remove };

    Op op = Op::Move;
    std::string target;        // move / recolor / remove
    Vec3 translation{0, 0, 0};  // move
    Vec3 new_color{0, 0, 0};    // recolor
    Primitive new_primitive;    // add
};

/// Returns the post-change scene; the input is untouched.
SceneSpec apply_edit(const SceneSpec& scene, const SceneEdit& edit);

/// Exact Lambertian radiance field over a SceneSpec: the (color, density)
/// of the last listed primitive containing x, else the background. The view
/// direction is accepted and ignored.
class AnalyticField final : public RadianceField {
public:
    explicit AnalyticField(SceneSpec scene);

    RadianceSample query(const Vec3& x, const Vec3& d) const override;
    const SceneSpec& scene() const { return scene_; }

private:
    SceneSpec scene_;
};

/// Point evaluation used by tests and ground-truth labeling.
RadianceSample eval_analytic_field(const SceneSpec& scene, const Vec3& x, const Vec3& d);

}  // namespace rfcd
