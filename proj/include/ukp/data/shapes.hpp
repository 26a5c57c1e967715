#pragma once

#include <string>
#include <vector>

#include "ukp/errors.hpp"
#include "ukp/geom/point_cloud.hpp"

namespace ukp::data {

enum class ShapeFamily { kRectangle, kBox, kTable, kChair };

ShapeFamily family_from_string(const std::string& name);
std::string family_name(ShapeFamily f);

// A parametric labeled shape. Size parameters are per family:
//   rectangle: {half_w, half_d}
//   box:       {half_w, half_d, half_h}
//   table:     {half_w, half_d, height, top_thickness, leg_size}
//   chair:     {half_w, half_d, seat_h, seat_thickness, leg_size, back_h, back_thickness}
// Empty size_params selects family defaults randomized from the seed.
struct ShapeSpec {
    ShapeFamily family = ShapeFamily::kRectangle;
    std::vector<float> size_params;
    int64_t n_points = 2048;
    float jitter = 0.005f;
    uint64_t seed = 0;
};

// Uniform surface sampling with part labels, analytic ground-truth corners
// snapped to sampled points, correspondence cells, and the x = 0 symmetry
// plane. Clouds are emitted pre-normalized (normalize_cloud is a no-op).
// Sampling mirrors every drawn point across x = 0, so mirror mates exist by
// construction.
geom::PointCloud generate(const ShapeSpec& spec);

// Uniform random subsample without replacement; labels and correspondence ids
// are carried along and ground-truth keypoints are re-snapped.
geom::PointCloud downsample(const geom::PointCloud& pc, int64_t m, uint64_t seed);

}  // namespace ukp::data
