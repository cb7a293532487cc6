#include "rfcd/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rfcd {

PixelMetrics pixel_metrics(const ChangeMap& pred, const ChangeMap& gt) {
    if (pred.width != gt.width || pred.height != gt.height)
        throw std::invalid_argument("pixel_metrics: dimension mismatch");
    PixelMetrics m;
    for (size_t i = 0; i < pred.values.size(); ++i) {
        bool p = pred.values[i] != 0, g = gt.values[i] != 0;
        m.tp += p && g;
        m.fp += p && !g;
        m.fn += !p && g;
    }
    if (m.tp + m.fp + m.fn == 0) {
        // Both masks empty: perfect agreement by convention.
        m.precision = m.recall = m.f1 = m.iou = 1.0;
        return m;
    }
    m.precision = m.tp + m.fp > 0 ? static_cast<double>(m.tp) / (m.tp + m.fp) : 0.0;
    m.recall = m.tp + m.fn > 0 ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    m.iou = static_cast<double>(m.tp) / (m.tp + m.fp + m.fn);
    return m;
}

BoxSet extract_boxes(const ChangeMap& map, int min_area) {
    BoxSet boxes;
    std::vector<std::uint8_t> seen(map.values.size(), 0);
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            size_t idx = static_cast<size_t>(y) * map.width + x;
            if (!map.values[idx] || seen[idx]) continue;

            PixelBox box{x, y, x, y, 0};
            int area = 0;
            stack.clear();
            stack.emplace_back(x, y);
            seen[idx] = 1;
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                ++area;
                box.x_min = std::min(box.x_min, cx);
                box.x_max = std::max(box.x_max, cx);
                box.y_min = std::min(box.y_min, cy);
                box.y_max = std::max(box.y_max, cy);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || nx >= map.width || ny < 0 || ny >= map.height) continue;
                        size_t nidx = static_cast<size_t>(ny) * map.width + nx;
                        if (map.values[nidx] && !seen[nidx]) {
                            seen[nidx] = 1;
                            stack.emplace_back(nx, ny);
                        }
                    }
                }
            }
            if (area >= min_area) {
                box.confidence = area;
                boxes.push_back(box);
            }
        }
    }
    return boxes;
}

double box_iou(const PixelBox& a, const PixelBox& b) {
    int ix_min = std::max(a.x_min, b.x_min), ix_max = std::min(a.x_max, b.x_max);
    int iy_min = std::max(a.y_min, b.y_min), iy_max = std::min(a.y_max, b.y_max);
    if (ix_min > ix_max || iy_min > iy_max) return 0.0;
    double inter = static_cast<double>(ix_max - ix_min + 1) * (iy_max - iy_min + 1);
    double uni = static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter;
    return inter / uni;
}

double map_score(const BoxSet& pred, const BoxSet& gt, double iou_threshold) {
    if (gt.empty() && pred.empty()) return 1.0;
    if (gt.empty() || pred.empty()) return 0.0;

    std::vector<size_t> order(pred.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t i, size_t j) { return pred[i].confidence > pred[j].confidence; });

    std::vector<bool> matched(gt.size(), false);
    double ap = 0.0;
    int tp = 0;
    for (size_t rank = 0; rank < order.size(); ++rank) {
        const PixelBox& p = pred[order[rank]];
        double best_iou = 0.0;
        int best = -1;
        for (size_t g = 0; g < gt.size(); ++g) {
            if (matched[g]) continue;
            double iou = box_iou(p, gt[g]);
            if (iou > best_iou) {
                best_iou = iou;
                best = static_cast<int>(g);
            }
        }
        if (best >= 0 && best_iou >= iou_threshold) {
            matched[best] = true;
            ++tp;
            ap += static_cast<double>(tp) / static_cast<double>(rank + 1);
        }
    }
    return ap / static_cast<double>(gt.size());
}

}  // namespace rfcd
