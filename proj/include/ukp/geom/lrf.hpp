#pragma once

#include "ukp/errors.hpp"
#include "ukp/geom/grid_index.hpp"
#include "ukp/geom/point_cloud.hpp"

namespace ukp::geom {

// Per-point orthonormal basis from the eigen-decomposition of the
// neighborhood covariance. Columns of `rotation` are the x, y, z axes;
// z is the smallest-eigenvalue direction and x the largest. Signs follow
// the neighbor-majority rule, y = z cross x closes a right-handed frame.
struct LocalReferenceFrame {
    Mat3 rotation;
    Vec3 origin;
};

struct DegenerateLrf : GeometryError {
    explicit DegenerateLrf(const std::string& msg) : GeometryError("degenerate LRF: " + msg) {}
};

// Eigenvalue separation required between sorted eigenvalues; below this the
// axes are unstable and the point is reported degenerate.
constexpr double kLrfEigenRatio = 1.02;

// Eigen-decomposition of a symmetric 3x3 matrix (cyclic Jacobi, double
// precision). Eigenvalues ascending; eigvecs[i] belongs to eigenvalues[i].
void symmetric_eigen3(const double cov[3][3], double eigenvalues[3], Vec3 eigvecs[3]);

LocalReferenceFrame estimate_lrf(const PointCloud& pc, int64_t center, float r);
LocalReferenceFrame estimate_lrf(const PointCloud& pc, int64_t center,
                                 const std::vector<int64_t>& neighborhood);

}  // namespace ukp::geom
