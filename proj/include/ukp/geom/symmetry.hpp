#pragma once

#include <utility>
#include <vector>

#include "ukp/geom/point_cloud.hpp"

namespace ukp::geom {

// Mirror-mate pairs: each point is reflected across the plane and matched to
// its nearest neighbor; the pair is kept iff the match is within `tol`.
// Each pair appears once with i < j; on-plane self-matches are excluded.
std::vector<std::pair<int64_t, int64_t>> symmetric_pairs(const PointCloud& pc,
                                                         const SymmetryPlane& plane, float tol);

Vec3 reflect_across(const Vec3& p, const SymmetryPlane& plane);

}  // namespace ukp::geom
