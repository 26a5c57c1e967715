#pragma once

#include "ukp/geom/lrf.hpp"

namespace ukp::geom {

// Smoothed-density-value grid: neighbors expressed in the point's LRF are
// splatted into a W^3 grid spanning [-r, r]^3 with a truncated Gaussian,
// then the grid is max-normalized to [0, 1].
struct SdvDescriptor {
    int width = 0;                 // W = H = D
    std::vector<float> grid;       // W*W*W, row-major (x, y, z)
    int64_t center = -1;
};

struct SdvConfig {
    int grid_width = 16;
    float sigma_voxels = 0.75f;    // sigma = sigma_voxels * voxel edge
    float truncate_sigmas = 3.0f;
};

SdvDescriptor compute_sdv(const PointCloud& pc, int64_t center, const LocalReferenceFrame& lrf,
                          float r, const SdvConfig& cfg = {});
SdvDescriptor compute_sdv(const PointCloud& pc, int64_t center, const LocalReferenceFrame& lrf,
                          float r, const std::vector<int64_t>& neighborhood, const SdvConfig& cfg);

}  // namespace ukp::geom
