#pragma once

#include <cstdint>
#include <vector>

#include "ukp/geom/vec3.hpp"

namespace ukp::geom {

// Greedy non-maximum suppression: repeatedly keep the highest-scoring
// unsuppressed point with score >= threshold (ties by lower index) and
// suppress everything within `radius` of it. Returned indices are sorted by
// descending score.
std::vector<int64_t> nms(const std::vector<Vec3>& points, const std::vector<float>& scores,
                         float radius, float threshold);

// Variant restricted to a candidate mask (empty mask = all candidates).
std::vector<int64_t> nms(const std::vector<Vec3>& points, const std::vector<float>& scores,
                         float radius, float threshold, const std::vector<char>& valid);

}  // namespace ukp::geom
