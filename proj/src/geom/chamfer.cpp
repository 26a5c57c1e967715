#include "ukp/geom/chamfer.hpp"

#include <algorithm>
#include <cmath>

#include "ukp/errors.hpp"
#include "ukp/geom/grid_index.hpp"

namespace ukp::geom {

namespace {

float pick_cell(const std::vector<Vec3>& pts) {
    Vec3 lo = pts[0], hi = pts[0];
    for (const Vec3& p : pts) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        lo.z = std::min(lo.z, p.z);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
        hi.z = std::max(hi.z, p.z);
    }
    float diag = (hi - lo).norm();
    return std::max(1e-4f, diag / 24.0f);
}

}  // namespace

std::vector<int64_t> nearest_indices(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    if (to.empty()) throw GeometryError("nearest_indices: empty target set");
    GridIndex index(to, pick_cell(to));
    std::vector<int64_t> out;
    out.reserve(from.size());
    for (const Vec3& p : from) out.push_back(index.nearest(p));
    return out;
}

double chamfer_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    if (a.empty() || b.empty()) throw GeometryError("chamfer_distance: empty point set");
    std::vector<int64_t> a_to_b = nearest_indices(a, b);
    std::vector<int64_t> b_to_a = nearest_indices(b, a);
    double sum_a = 0.0;
    for (size_t i = 0; i < a.size(); ++i) sum_a += dist2(a[i], b[static_cast<size_t>(a_to_b[i])]);
    double sum_b = 0.0;
    for (size_t j = 0; j < b.size(); ++j) sum_b += dist2(b[j], a[static_cast<size_t>(b_to_a[j])]);
    return sum_a / static_cast<double>(a.size()) + sum_b / static_cast<double>(b.size());
}

}  // namespace ukp::geom
