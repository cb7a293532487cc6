#pragma once

#include <cstdint>
#include <vector>

#include "rfcd/image.hpp"

namespace rfcd {

/// Pixel-level confusion counts and the derived scores. Both-empty inputs
/// score 1.0 across the board (perfect agreement).
struct PixelMetrics {
    std::uint64_t tp = 0, fp = 0, fn = 0;
    double precision = 0, recall = 0, f1 = 0, iou = 0;
};

/// Inclusive pixel box [x_min..x_max] x [y_min..y_max].
struct PixelBox {
    int x_min = 0, y_min = 0, x_max = 0, y_max = 0;
    double confidence = 0;  // component area when extracted from a mask

    std::uint64_t area() const {
        return static_cast<std::uint64_t>(x_max - x_min + 1) *
               static_cast<std::uint64_t>(y_max - y_min + 1);
    }
};

using BoxSet = std::vector<PixelBox>;

PixelMetrics pixel_metrics(const ChangeMap& pred, const ChangeMap& gt);

/// Tightest boxes of the 8-connected components; components smaller than
/// min_area pixels are dropped (speckle suppression). Confidence is the
/// component pixel count.
BoxSet extract_boxes(const ChangeMap& map, int min_area = 4);

double box_iou(const PixelBox& a, const PixelBox& b);

/// Average precision with greedy confidence-ordered matching: predictions
/// sorted by confidence (ties keep input order) each claim the best-IoU
/// unmatched ground-truth box at or above the threshold; AP is the mean of
/// the precision at each true-positive hit over the ground-truth count.
double map_score(const BoxSet& pred, const BoxSet& gt, double iou_threshold = 0.5);

}  // namespace rfcd
