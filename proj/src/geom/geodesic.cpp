#include "ukp/geom/geodesic.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "ukp/errors.hpp"

namespace ukp::geom {

KnnGraph build_knn_graph(const PointCloud& pc, int knn) {
    int64_t n = pc.size();
    if (n < 1) throw GeometryError("build_knn_graph: empty cloud");
    int k = static_cast<int>(std::min<int64_t>(knn, n - 1));
    KnnGraph g;
    g.adj.assign(static_cast<size_t>(n), {});
    std::vector<std::pair<float, int64_t>> cand;
    for (int64_t i = 0; i < n; ++i) {
        cand.clear();
        cand.reserve(static_cast<size_t>(n - 1));
        for (int64_t j = 0; j < n; ++j) {
            if (j == i) continue;
            cand.emplace_back(dist2(pc.points[static_cast<size_t>(i)], pc.points[static_cast<size_t>(j)]), j);
        }
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        for (int t = 0; t < k; ++t) {
            float d = std::sqrt(cand[static_cast<size_t>(t)].first);
            g.adj[static_cast<size_t>(i)].emplace_back(cand[static_cast<size_t>(t)].second, d);
        }
    }
    // symmetrize
    for (int64_t i = 0; i < n; ++i)
        for (auto [j, d] : g.adj[static_cast<size_t>(i)]) {
            auto& back = g.adj[static_cast<size_t>(j)];
            bool present = false;
            for (auto& [jj, dd] : back)
                if (jj == i) present = true;
            if (!present) back.emplace_back(i, d);
        }
    return g;
}

std::vector<double> geodesic_distances(const KnnGraph& graph, int64_t source) {
    int64_t n = static_cast<int64_t>(graph.adj.size());
    if (source < 0 || source >= n) throw GeometryError("geodesic_distances: source out of range");
    std::vector<double> dist(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int64_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[static_cast<size_t>(source)] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        auto [d, i] = heap.top();
        heap.pop();
        if (d > dist[static_cast<size_t>(i)]) continue;
        for (auto [j, w] : graph.adj[static_cast<size_t>(i)]) {
            double nd = d + w;
            if (nd < dist[static_cast<size_t>(j)]) {
                dist[static_cast<size_t>(j)] = nd;
                heap.emplace(nd, j);
            }
        }
    }
    return dist;
}

std::vector<double> geodesic_distances(const PointCloud& pc, int64_t source, int knn) {
    return geodesic_distances(build_knn_graph(pc, knn), source);
}

}  // namespace ukp::geom
