#include "ukp/geom/sdv.hpp"

#include <algorithm>
#include <cmath>

namespace ukp::geom {

SdvDescriptor compute_sdv(const PointCloud& pc, int64_t center, const LocalReferenceFrame& lrf,
                          float r, const SdvConfig& cfg) {
    return compute_sdv(pc, center, lrf, r, radius_neighbors(pc, center, r), cfg);
}

SdvDescriptor compute_sdv(const PointCloud& pc, int64_t center, const LocalReferenceFrame& lrf,
                          float r, const std::vector<int64_t>& neighborhood, const SdvConfig& cfg) {
    const int w = cfg.grid_width;
    SdvDescriptor out;
    out.width = w;
    out.center = center;
    out.grid.assign(static_cast<size_t>(w) * w * w, 0.0f);

    const float voxel = 2.0f * r / static_cast<float>(w);
    const float sigma = cfg.sigma_voxels * voxel;
    const float trunc = cfg.truncate_sigmas * sigma;
    const float inv_2s2 = 1.0f / (2.0f * sigma * sigma);
    const int reach = static_cast<int>(std::ceil(trunc / voxel)) + 1;
    const float trunc2 = trunc * trunc;

    for (int64_t i : neighborhood) {
        // canonical coordinates: R^T (x_i - center)
        Vec3 q = lrf.rotation.apply_transposed(pc.points[static_cast<size_t>(i)] - lrf.origin);
        // fractional voxel position; voxel v spans [-r + v*voxel, -r + (v+1)*voxel)
        float fx = (q.x + r) / voxel - 0.5f;
        float fy = (q.y + r) / voxel - 0.5f;
        float fz = (q.z + r) / voxel - 0.5f;
        int cx = static_cast<int>(std::floor(fx));
        int cy = static_cast<int>(std::floor(fy));
        int cz = static_cast<int>(std::floor(fz));
        for (int vx = std::max(0, cx - reach); vx <= std::min(w - 1, cx + reach); ++vx) {
            float dx = (static_cast<float>(vx) - fx) * voxel;
            for (int vy = std::max(0, cy - reach); vy <= std::min(w - 1, cy + reach); ++vy) {
                float dy = (static_cast<float>(vy) - fy) * voxel;
                float dxy2 = dx * dx + dy * dy;
                if (dxy2 > trunc2) continue;
                for (int vz = std::max(0, cz - reach); vz <= std::min(w - 1, cz + reach); ++vz) {
                    float dz = (static_cast<float>(vz) - fz) * voxel;
                    float d2 = dxy2 + dz * dz;
                    if (d2 > trunc2) continue;
                    out.grid[static_cast<size_t>((vx * w + vy) * w + vz)] += std::exp(-d2 * inv_2s2);
                }
            }
        }
    }

    float peak = 0.0f;
    for (float v : out.grid) peak = std::max(peak, v);
    if (peak > 0.0f) {
        float inv = 1.0f / peak;
        for (float& v : out.grid) v *= inv;
    }
    return out;
}

}  // namespace ukp::geom
