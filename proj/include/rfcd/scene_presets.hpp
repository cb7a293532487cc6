#pragma once

#include <string>
#include <vector>

#include "rfcd/scene.hpp"
#include "rfcd/trajectory.hpp"

namespace rfcd {

/// A ready-made pre/post scene pair with a matching capture trajectory.
struct ScenePairPreset {
    std::string name;
    SceneSpec pre;
    SceneSpec post;
    TrajectorySpec trajectory;
};

/// Built-in synthetic benchmarks:
///   moved_box    - a checkered box slides sideways (surround capture)
///   recolor_box  - one box flips red -> blue, geometry untouched
///   added_sphere - a sphere appears next to the desk objects
///   unchanged    - identical pre/post pair, for false-positive studies
ScenePairPreset scene_preset(const std::string& name);

std::vector<std::string> scene_preset_names();

}  // namespace rfcd
