#include "rfcd/scene_presets.hpp"

#include <stdexcept>

namespace rfcd {

namespace {

Primitive box(std::string id, Vec3 center, Vec3 half, Vec3 color, double density) {
    Primitive p;
    p.id = std::move(id);
    p.shape = Primitive::Shape::Box;
    p.center = center;
    p.half_extents = half;
    p.color = color;
    p.density = density;
    return p;
}

Primitive sphere(std::string id, Vec3 center, double radius, Vec3 color, double density) {
    Primitive p;
    p.id = std::move(id);
    p.shape = Primitive::Shape::Sphere;
    p.center = center;
    p.radius = radius;
    p.color = color;
    p.density = density;
    return p;
}

/// Desk-scale base scene: a checkered desk slab with a few props on top.
SceneSpec desk_scene() {
    SceneSpec scene;
    scene.bounds = Aabb{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}};
    scene.background_density = 0.0;

    Primitive desk = box("desk", {0, 0, -0.1}, {0.9, 0.9, 0.1}, {0.75, 0.72, 0.65}, 10.0);
    desk.checker = true;
    desk.checker_color = {0.45, 0.43, 0.4};
    desk.checker_cell = 0.15;
    scene.primitives.push_back(desk);

    scene.primitives.push_back(
        box("crate", {-0.35, 0.1, 0.12}, {0.12, 0.12, 0.12}, {0.9, 0.12, 0.08}, 8.0));
    scene.primitives.push_back(sphere("ball", {0.45, -0.35, 0.1}, 0.1, {0.1, 0.2, 0.85}, 8.0));

    Primitive block = box("block", {0.3, 0.45, 0.1}, {0.1, 0.1, 0.1}, {0.15, 0.7, 0.2}, 8.0);
    block.checker = true;
    block.checker_color = {0.08, 0.35, 0.1};
    block.checker_cell = 0.07;
    scene.primitives.push_back(block);

    return scene;
}

TrajectorySpec desk_trajectory() {
    TrajectorySpec t;
    t.mode = TrajectorySpec::Mode::Surround;
    t.center = {0, 0, 0.15};
    t.per_circle = 40;
    t.radius = 2.0;
    t.circle_heights[0] = 0.15;
    t.circle_heights[1] = 0.55;
    t.circle_heights[2] = 0.95;
    t.image_width = 252;
    t.image_height = 189;
    t.focal_px = 260.0;
    t.near = 0.3;
    t.far = 6.0;
    return t;
}

}  // namespace

ScenePairPreset scene_preset(const std::string& name) {
    ScenePairPreset preset;
    preset.name = name;
    preset.pre = desk_scene();
    preset.trajectory = desk_trajectory();

    SceneEdit edit;
    if (name == "moved_box") {
        edit.op = SceneEdit::Op::Move;
        edit.target = "crate";
        edit.translation = {0.45, -0.2, 0.0};
    } else if (name == "recolor_box") {
        edit.op = SceneEdit::Op::Recolor;
        edit.target = "crate";
        edit.new_color = {0.08, 0.12, 0.9};
    } else if (name == "added_sphere") {
        edit.op = SceneEdit::Op::Add;
        edit.new_primitive = sphere("newcomer", {-0.1, -0.45, 0.12}, 0.12, {0.95, 0.8, 0.1}, 8.0);
    } else if (name == "unchanged") {
        preset.post = preset.pre;
        return preset;
    } else {
        throw std::invalid_argument("unknown scene preset: " + name);
    }
    preset.post = apply_edit(preset.pre, edit);
    return preset;
}

std::vector<std::string> scene_preset_names() {
    return {"moved_box", "recolor_box", "added_sphere", "unchanged"};
}

}  // namespace rfcd
