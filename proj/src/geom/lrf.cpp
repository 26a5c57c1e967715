#include "ukp/geom/lrf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ukp::geom {

void symmetric_eigen3(const double cov[3][3], double eigenvalues[3], Vec3 eigvecs[3]) {
    // Cyclic Jacobi on a copy; V accumulates the rotations.
    double a[3][3];
    double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a[i][j] = cov[i][j];

    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if (off < 1e-30) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (std::fabs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
    }
    int order[3] = {0, 1, 2};
    double ev[3] = {a[0][0], a[1][1], a[2][2]};
    std::sort(order, order + 3, [&](int i, int j) { return ev[i] < ev[j]; });
    for (int i = 0; i < 3; ++i) {
        eigenvalues[i] = ev[order[i]];
        eigvecs[i] = Vec3(static_cast<float>(v[0][order[i]]), static_cast<float>(v[1][order[i]]),
                          static_cast<float>(v[2][order[i]]));
    }
}

LocalReferenceFrame estimate_lrf(const PointCloud& pc, int64_t center, float r) {
    return estimate_lrf(pc, center, radius_neighbors(pc, center, r));
}

LocalReferenceFrame estimate_lrf(const PointCloud& pc, int64_t center,
                                 const std::vector<int64_t>& neighborhood) {
    if (neighborhood.size() < 4) throw DegenerateLrf("fewer than 4 neighbors");
    const Vec3 c = pc.points[static_cast<size_t>(center)];

    double mean[3] = {0, 0, 0};
    for (int64_t i : neighborhood) {
        const Vec3& p = pc.points[static_cast<size_t>(i)];
        mean[0] += p.x;
        mean[1] += p.y;
        mean[2] += p.z;
    }
    double n = static_cast<double>(neighborhood.size());
    for (double& m : mean) m /= n;

    double cov[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    for (int64_t i : neighborhood) {
        const Vec3& p = pc.points[static_cast<size_t>(i)];
        double d[3] = {p.x - mean[0], p.y - mean[1], p.z - mean[2]};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) cov[a][b] += d[a] * d[b];
    }
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) cov[a][b] /= n;

    double ev[3];
    Vec3 axes[3];
    symmetric_eigen3(cov, ev, axes);
    // ev ascending: ev[0] smallest (z axis), ev[2] largest (x axis)
    if (ev[2] < 1e-20) throw DegenerateLrf("rank-deficient covariance");
    double r21 = ev[1] > 0 ? ev[2] / ev[1] : std::numeric_limits<double>::infinity();
    double r10 = ev[0] > 0 ? ev[1] / ev[0] : std::numeric_limits<double>::infinity();
    if (r21 < kLrfEigenRatio || r10 < kLrfEigenRatio)
        throw DegenerateLrf("eigenvalue ratios below threshold");

    Vec3 zaxis = axes[0].normalized();
    Vec3 xaxis = axes[2].normalized();
    // Density-majority sign rule, magnitude-weighted: each axis points toward
    // the heavier side of the neighborhood. The weighted sum rotates exactly
    // with the data, unlike counting votes whose one-vote margins flip on
    // rounding noise.
    double zvotes = 0.0, xvotes = 0.0;
    for (int64_t i : neighborhood) {
        Vec3 d = pc.points[static_cast<size_t>(i)] - c;
        zvotes += d.dot(zaxis);
        xvotes += d.dot(xaxis);
    }
    if (zvotes < 0.0) zaxis = zaxis * -1.0f;
    if (xvotes < 0.0) xaxis = xaxis * -1.0f;
    // Re-orthogonalize x against z before closing the frame.
    xaxis = (xaxis - zaxis * xaxis.dot(zaxis)).normalized();
    Vec3 yaxis = zaxis.cross(xaxis);

    LocalReferenceFrame lrf;
    lrf.rotation = Mat3::from_cols(xaxis, yaxis, zaxis);
    lrf.origin = c;
    return lrf;
}

}  // namespace ukp::geom
