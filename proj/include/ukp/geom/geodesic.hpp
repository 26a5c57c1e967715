#pragma once

#include <vector>

#include "ukp/geom/point_cloud.hpp"

namespace ukp::geom {

constexpr int kGeodesicKnn = 10;

// Shortest-path distances from `source` over the symmetrized k-NN graph with
// Euclidean edge weights. Unreachable points get +infinity.
std::vector<double> geodesic_distances(const PointCloud& pc, int64_t source, int knn = kGeodesicKnn);

// The graph itself, reusable across many sources on the same cloud.
struct KnnGraph {
    std::vector<std::vector<std::pair<int64_t, float>>> adj;
};
KnnGraph build_knn_graph(const PointCloud& pc, int knn = kGeodesicKnn);
std::vector<double> geodesic_distances(const KnnGraph& graph, int64_t source);

}  // namespace ukp::geom
