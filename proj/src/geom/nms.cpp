#include "ukp/geom/nms.hpp"

#include <algorithm>

#include "ukp/errors.hpp"

namespace ukp::geom {

std::vector<int64_t> nms(const std::vector<Vec3>& points, const std::vector<float>& scores,
                         float radius, float threshold) {
    return nms(points, scores, radius, threshold, {});
}

std::vector<int64_t> nms(const std::vector<Vec3>& points, const std::vector<float>& scores,
                         float radius, float threshold, const std::vector<char>& valid) {
    if (radius <= 0.0f) throw GeometryError("nms: radius must be positive");
    if (points.size() != scores.size()) throw GeometryError("nms: points/scores size mismatch");
    int64_t n = static_cast<int64_t>(points.size());

    std::vector<int64_t> order;
    order.reserve(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
        if (!valid.empty() && !valid[static_cast<size_t>(i)]) continue;
        if (scores[static_cast<size_t>(i)] >= threshold) order.push_back(i);
    }
    // highest score first; ties by lower index
    std::stable_sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
        float sa = scores[static_cast<size_t>(a)], sb = scores[static_cast<size_t>(b)];
        if (sa != sb) return sa > sb;
        return a < b;
    });

    std::vector<int64_t> kept;
    float r2 = radius * radius;
    for (int64_t i : order) {
        bool suppressed = false;
        for (int64_t j : kept)
            if (dist2(points[static_cast<size_t>(i)], points[static_cast<size_t>(j)]) <= r2) {
                suppressed = true;
                break;
            }
        if (!suppressed) kept.push_back(i);
    }
    return kept;  // already in descending-score order
}

}  // namespace ukp::geom
