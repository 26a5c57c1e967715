#pragma once

#include <vector>

#include "ukp/geom/vec3.hpp"

namespace ukp::geom {

// Symmetric mean nearest-neighbor squared distance:
//   (1/|A|) sum_a min_b ||a-b||^2 + (1/|B|) sum_b min_a ||a-b||^2
// Throws GeometryError on an empty set.
double chamfer_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

// Nearest-neighbor index in `to` for every point of `from` (grid-accelerated).
std::vector<int64_t> nearest_indices(const std::vector<Vec3>& from, const std::vector<Vec3>& to);

}  // namespace ukp::geom
