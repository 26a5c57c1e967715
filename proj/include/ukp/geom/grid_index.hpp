#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ukp/geom/point_cloud.hpp"

namespace ukp::geom {

// Uniform-grid accelerator for fixed-radius and nearest-neighbor queries.
class GridIndex {
public:
    GridIndex(const std::vector<Vec3>& points, float cell_size);

    // All indices i with ||p_i - q|| <= r, sorted ascending.
    std::vector<int64_t> query_ball(const Vec3& q, float r) const;

    // Index of the nearest point to q (-1 if the index is empty).
    int64_t nearest(const Vec3& q) const;

    // Nearest point excluding one index (for self-queries).
    int64_t nearest_excluding(const Vec3& q, int64_t exclude) const;

private:
    int64_t cell_key(int ix, int iy, int iz) const;
    void cell_of(const Vec3& p, int& ix, int& iy, int& iz) const;
    int64_t nearest_impl(const Vec3& q, int64_t exclude) const;

    const std::vector<Vec3>& points_;
    float cell_;
    std::unordered_map<int64_t, std::vector<int64_t>> cells_;
};

// Convenience wrappers over a per-call index (fine at desk scale).
// All i with ||x_i - x_center|| <= r, center included, sorted ascending.
std::vector<int64_t> radius_neighbors(const PointCloud& pc, int64_t center, float r);

}  // namespace ukp::geom
