#include "ukp/geom/grid_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ukp/errors.hpp"

namespace ukp::geom {

GridIndex::GridIndex(const std::vector<Vec3>& points, float cell_size)
    : points_(points), cell_(cell_size > 0.0f ? cell_size : 1.0f) {
    cells_.reserve(points.size());
    for (int64_t i = 0; i < static_cast<int64_t>(points.size()); ++i) {
        int ix, iy, iz;
        cell_of(points[static_cast<size_t>(i)], ix, iy, iz);
        cells_[cell_key(ix, iy, iz)].push_back(i);
    }
}

int64_t GridIndex::cell_key(int ix, int iy, int iz) const {
    // 21 bits per signed coordinate
    auto enc = [](int v) { return static_cast<int64_t>(v + (1 << 20)) & ((1 << 21) - 1); };
    return (enc(ix) << 42) | (enc(iy) << 21) | enc(iz);
}

void GridIndex::cell_of(const Vec3& p, int& ix, int& iy, int& iz) const {
    ix = static_cast<int>(std::floor(p.x / cell_));
    iy = static_cast<int>(std::floor(p.y / cell_));
    iz = static_cast<int>(std::floor(p.z / cell_));
}

std::vector<int64_t> GridIndex::query_ball(const Vec3& q, float r) const {
    std::vector<int64_t> out;
    int cx, cy, cz;
    cell_of(q, cx, cy, cz);
    int reach = static_cast<int>(std::ceil(r / cell_));
    float r2 = r * r;
    for (int ix = cx - reach; ix <= cx + reach; ++ix)
        for (int iy = cy - reach; iy <= cy + reach; ++iy)
            for (int iz = cz - reach; iz <= cz + reach; ++iz) {
                auto it = cells_.find(cell_key(ix, iy, iz));
                if (it == cells_.end()) continue;
                for (int64_t i : it->second)
                    if (dist2(points_[static_cast<size_t>(i)], q) <= r2) out.push_back(i);
            }
    std::sort(out.begin(), out.end());
    return out;
}

int64_t GridIndex::nearest_impl(const Vec3& q, int64_t exclude) const {
    if (points_.empty()) return -1;

    int64_t best = -1;
    float best_d2 = std::numeric_limits<float>::max();
    auto consider = [&](int64_t i) {
        if (i == exclude) return;
        float d2 = dist2(points_[static_cast<size_t>(i)], q);
        if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
            best_d2 = d2;
            best = i;
        }
    };
    auto scan_all = [&]() {
        for (int64_t i = 0; i < static_cast<int64_t>(points_.size()); ++i) consider(i);
        return best;
    };
    if (points_.size() <= 64) return scan_all();

    int cx, cy, cz;
    cell_of(q, cx, cy, cz);
    int prev = -1;
    // Doubling reach; once a candidate exists, anything in a cell beyond
    // reach is at least reach*cell away, which certifies optimality.
    for (int reach = 1;; reach = reach * 2) {
        int64_t box = 2 * static_cast<int64_t>(reach) + 1;
        if (box * box * box > 8 * static_cast<int64_t>(cells_.size())) return scan_all();
        for (int ix = cx - reach; ix <= cx + reach; ++ix)
            for (int iy = cy - reach; iy <= cy + reach; ++iy)
                for (int iz = cz - reach; iz <= cz + reach; ++iz) {
                    if (std::max({std::abs(ix - cx), std::abs(iy - cy), std::abs(iz - cz)}) <= prev) continue;
                    auto it = cells_.find(cell_key(ix, iy, iz));
                    if (it == cells_.end()) continue;
                    for (int64_t i : it->second) consider(i);
                }
        if (best >= 0) {
            float safe = static_cast<float>(reach) * cell_;
            if (best_d2 <= safe * safe) return best;
        }
        prev = reach;
    }
}

int64_t GridIndex::nearest(const Vec3& q) const { return nearest_impl(q, -1); }

int64_t GridIndex::nearest_excluding(const Vec3& q, int64_t exclude) const { return nearest_impl(q, exclude); }

std::vector<int64_t> radius_neighbors(const PointCloud& pc, int64_t center, float r) {
    if (r <= 0.0f) throw GeometryError("radius_neighbors: radius must be positive");
    if (center < 0 || center >= pc.size()) throw GeometryError("radius_neighbors: center out of range");
    GridIndex index(pc.points, r);
    return index.query_ball(pc.points[static_cast<size_t>(center)], r);
}

}  // namespace ukp::geom
