#include "ukp/geom/point_cloud.hpp"

#include <algorithm>
#include <cmath>

#include "ukp/errors.hpp"
#include "ukp/geom/grid_index.hpp"

namespace ukp::geom {

PointCloud normalize_cloud(const PointCloud& pc) {
    if (pc.size() < 2) throw GeometryError("normalize_cloud: need at least 2 points");
    for (const Vec3& p : pc.points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
            throw GeometryError("normalize_cloud: non-finite coordinate");

    double cx = 0.0, cy = 0.0, cz = 0.0;
    for (const Vec3& p : pc.points) {
        cx += p.x;
        cy += p.y;
        cz += p.z;
    }
    double n = static_cast<double>(pc.size());
    Vec3 centroid(static_cast<float>(cx / n), static_cast<float>(cy / n), static_cast<float>(cz / n));

    double max_d = 0.0;
    for (const Vec3& p : pc.points) max_d = std::max(max_d, static_cast<double>((p - centroid).norm()));
    if (max_d < 1e-12) throw GeometryError("normalize_cloud: all points identical");

    PointCloud out = pc;
    float s = static_cast<float>(1.0 / max_d);
    for (Vec3& p : out.points) p = (p - centroid) * s;
    if (out.symmetry_plane) {
        // plane n.x = d maps to n.x' = (d - n.c) / max_d under x' = (x - c)/max_d
        out.symmetry_plane->offset =
            (out.symmetry_plane->offset - out.symmetry_plane->normal.dot(centroid)) * s;
    }
    return out;
}

PointCloud rotate_cloud(const PointCloud& pc, const Mat3& rotation) {
    PointCloud out = pc;
    for (Vec3& p : out.points) p = rotation * p;
    if (out.symmetry_plane) out.symmetry_plane->normal = rotation * out.symmetry_plane->normal;
    return out;
}

float median_nn_spacing(const PointCloud& pc) {
    if (pc.size() < 2) throw GeometryError("median_nn_spacing: need at least 2 points");
    // Cell size from the bounding box keeps the grid balanced.
    Vec3 lo = pc.points[0], hi = pc.points[0];
    for (const Vec3& p : pc.points) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        lo.z = std::min(lo.z, p.z);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
        hi.z = std::max(hi.z, p.z);
    }
    float diag = (hi - lo).norm();
    GridIndex index(pc.points, std::max(1e-4f, diag / 32.0f));
    std::vector<float> d;
    d.reserve(pc.points.size());
    for (int64_t i = 0; i < pc.size(); ++i) {
        int64_t j = index.nearest_excluding(pc.points[i], i);
        if (j >= 0) d.push_back(dist(pc.points[i], pc.points[static_cast<size_t>(j)]));
    }
    std::sort(d.begin(), d.end());
    return d[d.size() / 2];
}

}  // namespace ukp::geom
