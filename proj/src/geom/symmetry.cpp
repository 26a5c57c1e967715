#include "ukp/geom/symmetry.hpp"

#include <algorithm>
#include <set>

#include "ukp/geom/grid_index.hpp"

namespace ukp::geom {

Vec3 reflect_across(const Vec3& p, const SymmetryPlane& plane) {
    float d = plane.normal.dot(p) - plane.offset;
    return p - plane.normal * (2.0f * d);
}

std::vector<std::pair<int64_t, int64_t>> symmetric_pairs(const PointCloud& pc,
                                                         const SymmetryPlane& plane, float tol) {
    std::set<std::pair<int64_t, int64_t>> pairs;
    GridIndex index(pc.points, std::max(tol, 1e-4f));
    for (int64_t i = 0; i < pc.size(); ++i) {
        Vec3 mirror = reflect_across(pc.points[static_cast<size_t>(i)], plane);
        int64_t j = index.nearest(mirror);
        if (j < 0 || j == i) continue;  // on-plane self matches excluded
        if (dist(mirror, pc.points[static_cast<size_t>(j)]) > tol) continue;
        pairs.emplace(std::min(i, j), std::max(i, j));
    }
    return {pairs.begin(), pairs.end()};
}

}  // namespace ukp::geom
