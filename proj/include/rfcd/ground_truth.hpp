#pragma once

#include "rfcd/camera.hpp"
#include "rfcd/image.hpp"
#include "rfcd/scene.hpp"

namespace rfcd {

/// Ground-truth change labels for a view of an analytic scene pair.
///
/// A pixel is marked changed iff the first-hit surface along its ray — the
/// per-scene argmax composite weight, nearer of the two, the same selection
/// rule the detector uses — sits where the two scenes disagree in color or
/// density beyond 1e-6. Rays that hit nothing in either scene are unchanged.
ChangeMap ground_truth_change_mask(const SceneSpec& scene_a, const SceneSpec& scene_b,
                                   const Camera& camera, int k);

}  // namespace rfcd
