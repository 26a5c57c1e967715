#pragma once

#include <string>

#include "ukp/geom/point_cloud.hpp"

namespace ukp::geom {

// ASCII PLY with float x,y,z; optional int properties "part" and "corr";
// optional comments "symmetry_plane nx ny nz d" and "keypoint <index>".
// Unknown properties are skipped with a warning on stderr. Meshes (any face
// element with a positive count) are rejected.
PointCloud read_ply(const std::string& path);
void write_ply(const std::string& path, const PointCloud& pc);

// Heat-map export: per-vertex red-blue uchar colors mapping values in [0,1].
void write_ply_colored(const std::string& path, const PointCloud& pc,
                       const std::vector<float>& values);

}  // namespace ukp::geom
