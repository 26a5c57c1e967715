#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ukp/geom/vec3.hpp"

namespace ukp::geom {

struct SymmetryPlane {
    Vec3 normal{1, 0, 0};  // unit
    float offset = 0.0f;   // plane: normal . x = offset
};

// N x 3 coordinates with optional annotations. Models expect clouds
// normalized to a unit-radius bounding sphere around the centroid.
struct PointCloud {
    std::vector<Vec3> points;
    std::vector<int> part_labels;          // empty or size N
    std::vector<int64_t> gt_keypoints;     // indices into points
    std::vector<int> correspondence_ids;   // empty or size N
    std::optional<SymmetryPlane> symmetry_plane;

    int64_t size() const { return static_cast<int64_t>(points.size()); }
    bool has_labels() const { return !part_labels.empty(); }
    bool has_correspondence() const { return !correspondence_ids.empty(); }
};

// Translate to the centroid and scale so the bounding sphere has radius 1
// (max pairwise distance <= 2). Labels and indices are preserved.
PointCloud normalize_cloud(const PointCloud& pc);

// Apply a rotation to every point (annotations preserved, plane rotated).
PointCloud rotate_cloud(const PointCloud& pc, const Mat3& rotation);

// Median nearest-neighbor distance; the natural sampling-resolution scale.
float median_nn_spacing(const PointCloud& pc);

}  // namespace ukp::geom
