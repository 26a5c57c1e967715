#include "ukp/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "ukp/geom/nms.hpp"
#include "ukp/geom/rotation.hpp"

namespace ukp::eval {

using geom::PointCloud;
using geom::Vec3;

KmeansResult kmeans(const std::vector<Vec3>& points, int k, int restarts, uint64_t seed) {
    if (k < 1 || static_cast<size_t>(k) > points.size())
        throw MetricError("kmeans: need at least k points, got " + std::to_string(points.size()));
    Rng rng(seed);
    KmeansResult best;
    best.inertia = std::numeric_limits<double>::max();
    int64_t n = static_cast<int64_t>(points.size());

    for (int r = 0; r < restarts; ++r) {
        // distinct random points as initial centroids
        std::vector<int64_t> order(static_cast<size_t>(n));
        for (int64_t i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
        rng.shuffle(order);
        std::vector<Vec3> centroids;
        for (int c = 0; c < k; ++c) centroids.push_back(points[static_cast<size_t>(order[static_cast<size_t>(c)])]);

        std::vector<int> assign(static_cast<size_t>(n), 0);
        for (int iter = 0; iter < 200; ++iter) {
            for (int64_t i = 0; i < n; ++i) {
                float bd = std::numeric_limits<float>::max();
                int bc = 0;
                for (int c = 0; c < k; ++c) {
                    float d = geom::dist2(points[static_cast<size_t>(i)], centroids[static_cast<size_t>(c)]);
                    if (d < bd) {
                        bd = d;
                        bc = c;
                    }
                }
                assign[static_cast<size_t>(i)] = bc;
            }
            double shift = 0.0;
            for (int c = 0; c < k; ++c) {
                Vec3 sum{0, 0, 0};
                int64_t cnt = 0;
                for (int64_t i = 0; i < n; ++i)
                    if (assign[static_cast<size_t>(i)] == c) {
                        sum += points[static_cast<size_t>(i)];
                        ++cnt;
                    }
                if (cnt > 0) {
                    Vec3 nc = sum * (1.0f / static_cast<float>(cnt));
                    shift = std::max(shift, static_cast<double>(geom::dist(nc, centroids[static_cast<size_t>(c)])));
                    centroids[static_cast<size_t>(c)] = nc;
                }
            }
            if (shift < 1e-6) break;
        }
        double inertia = 0.0;
        for (int64_t i = 0; i < n; ++i)
            inertia += geom::dist2(points[static_cast<size_t>(i)],
                                   centroids[static_cast<size_t>(assign[static_cast<size_t>(i)])]);
        if (inertia < best.inertia) {
            best.inertia = inertia;
            best.assignment = assign;
            best.centroids = centroids;
        }
    }
    return best;
}

double mean_correspondence_ratio(const std::vector<model::DetectionResult>& results,
                                 const std::vector<const PointCloud*>& clouds, int k, uint64_t seed) {
    if (results.size() != clouds.size()) throw MetricError("mean_correspondence_ratio: size mismatch");
    std::vector<Vec3> pts;
    std::vector<int> labels;
    for (size_t c = 0; c < results.size(); ++c) {
        const PointCloud& pc = *clouds[c];
        if (!pc.has_labels()) throw MetricError("mean_correspondence_ratio: cloud lacks part labels");
        for (int64_t idx : results[c].keypoint_indices) {
            if (idx < 0 || idx >= pc.size()) throw MetricError("keypoint index out of range");
            pts.push_back(pc.points[static_cast<size_t>(idx)]);
            labels.push_back(pc.part_labels[static_cast<size_t>(idx)]);
        }
    }
    if (static_cast<int64_t>(pts.size()) < k)
        throw MetricError("mean_correspondence_ratio: " + std::to_string(pts.size()) +
                          " keypoints for k=" + std::to_string(k));
    KmeansResult km = kmeans(pts, k, 10, seed);

    double sum = 0.0;
    int clusters = 0;
    for (int c = 0; c < k; ++c) {
        std::map<int, int64_t> hist;
        int64_t total = 0;
        for (size_t i = 0; i < pts.size(); ++i)
            if (km.assignment[i] == c) {
                ++hist[labels[i]];
                ++total;
            }
        if (total == 0) continue;
        int64_t majority = 0;
        for (auto& [label, cnt] : hist) majority = std::max(majority, cnt);
        sum += static_cast<double>(majority) / static_cast<double>(total);
        ++clusters;
    }
    if (clusters == 0) throw MetricError("mean_correspondence_ratio: empty clustering");
    return 100.0 * sum / static_cast<double>(clusters);
}

double keypoint_miou(const std::vector<int64_t>& detected, const std::vector<int64_t>& gt,
                     const geom::KnnGraph& graph, double geo_threshold) {
    if (gt.empty()) throw MetricError("keypoint_miou: empty ground truth");
    if (detected.empty()) return 0.0;

    // geodesic distances from each ground-truth keypoint
    struct Pair {
        double d;
        size_t di, gi;
    };
    std::vector<Pair> pairs;
    for (size_t gi = 0; gi < gt.size(); ++gi) {
        std::vector<double> dist = geom::geodesic_distances(graph, gt[gi]);
        for (size_t di = 0; di < detected.size(); ++di) {
            double d = dist[static_cast<size_t>(detected[di])];
            if (std::isfinite(d) && d <= geo_threshold) pairs.push_back({d, di, gi});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.di != b.di) return a.di < b.di;
        return a.gi < b.gi;
    });
    std::vector<char> dused(detected.size(), 0), gused(gt.size(), 0);
    int64_t matched = 0;
    for (const Pair& p : pairs) {
        if (dused[p.di] || gused[p.gi]) continue;
        dused[p.di] = 1;
        gused[p.gi] = 1;
        ++matched;
    }
    double uni = static_cast<double>(detected.size() + gt.size() - static_cast<size_t>(matched));
    return static_cast<double>(matched) / uni;
}

double keypoint_miou(const std::vector<int64_t>& detected, const std::vector<int64_t>& gt,
                     const PointCloud& pc, double geo_threshold) {
    return keypoint_miou(detected, gt, geom::build_knn_graph(pc), geo_threshold);
}

double rotation_repeatability(const model::Detector& detector, const PointCloud& pc,
                              int64_t n_keypoints, double dist_threshold, int n_rotations,
                              uint64_t seed) {
    if (n_keypoints < 1) throw MetricError("rotation_repeatability: n_keypoints must be >= 1");
    model::DetectionResult base = detector(pc);
    if (static_cast<int64_t>(base.keypoint_indices.size()) < n_keypoints)
        throw MetricError("rotation_repeatability: detector returned " +
                          std::to_string(base.keypoint_indices.size()) + " keypoints, need " +
                          std::to_string(n_keypoints));
    std::vector<Vec3> base_pts;
    for (int64_t i = 0; i < n_keypoints; ++i)
        base_pts.push_back(pc.points[static_cast<size_t>(base.keypoint_indices[static_cast<size_t>(i)])]);

    Rng rng(seed);
    double acc = 0.0;
    for (int r = 0; r < n_rotations; ++r) {
        geom::Mat3 rot = geom::random_rotation(rng);
        PointCloud rotated = geom::rotate_cloud(pc, rot);
        model::DetectionResult dr = detector(rotated);
        if (static_cast<int64_t>(dr.keypoint_indices.size()) < n_keypoints)
            throw MetricError("rotation_repeatability: detector returned " +
                              std::to_string(dr.keypoint_indices.size()) + " keypoints on a rotated cloud, need " +
                              std::to_string(n_keypoints));
        // map back through the ground-truth rotation: index i of the rotated
        // cloud corresponds to the original point i
        std::vector<Vec3> mapped;
        for (int64_t i = 0; i < n_keypoints; ++i)
            mapped.push_back(pc.points[static_cast<size_t>(dr.keypoint_indices[static_cast<size_t>(i)])]);

        int64_t repeatable = 0;
        for (const Vec3& p : base_pts) {
            float best = std::numeric_limits<float>::max();
            for (const Vec3& q : mapped) best = std::min(best, geom::dist(p, q));
            if (best <= dist_threshold) ++repeatable;
        }
        acc += static_cast<double>(repeatable) / static_cast<double>(n_keypoints);
    }
    return 100.0 * acc / static_cast<double>(n_rotations);
}

double correspondence_iou(const std::vector<int64_t>& detected_a, const std::vector<int>& corr_a,
                          const std::vector<int64_t>& detected_b, const std::vector<int>& corr_b,
                          UnionMode mode) {
    auto ids_of = [](const std::vector<int64_t>& detected, const std::vector<int>& corr) {
        std::set<int> ids;
        for (int64_t i : detected) {
            if (i < 0 || i >= static_cast<int64_t>(corr.size()))
                throw MetricError("correspondence_iou: detection outside the correspondence map");
            int id = corr[static_cast<size_t>(i)];
            if (!ids.insert(id).second)
                throw MetricError("correspondence_iou: id collision on id " + std::to_string(id));
        }
        return ids;
    };
    std::set<int> a = ids_of(detected_a, corr_a);
    std::set<int> b = ids_of(detected_b, corr_b);
    if (a.empty() && b.empty()) return 0.0;
    int64_t inter = 0;
    for (int id : a) inter += b.count(id) ? 1 : 0;
    double denom = mode == UnionMode::kDistinct
                       ? static_cast<double>(a.size() + b.size() - static_cast<size_t>(inter))
                       : static_cast<double>(a.size() + b.size());
    return 100.0 * static_cast<double>(inter) / denom;
}

std::vector<int64_t> top_k_by_score(const std::vector<Vec3>& points, const std::vector<float>& saliency,
                                    const std::vector<char>& valid, int64_t k, float nms_radius) {
    auto kept = geom::nms(points, saliency, nms_radius, -std::numeric_limits<float>::max(), valid);
    if (static_cast<int64_t>(kept.size()) < k)
        throw MetricError("top_k_by_score: " + std::to_string(kept.size()) + " candidates for k=" +
                          std::to_string(k));
    kept.resize(static_cast<size_t>(k));
    return kept;
}

}  // namespace ukp::eval
