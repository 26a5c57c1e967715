#pragma once

#include <vector>

#include "ukp/geom/geodesic.hpp"
#include "ukp/model/model.hpp"

namespace ukp::eval {

// Cluster purity of pooled detected keypoints against part labels (%).
// Keypoint coordinates from every (canonically posed) cloud are pooled and
// clustered with seeded K-means (10 restarts, lowest inertia); each cluster
// scores majority-label count / size.
double mean_correspondence_ratio(const std::vector<model::DetectionResult>& results,
                                 const std::vector<const geom::PointCloud*>& clouds, int k = 8,
                                 uint64_t seed = 0);

// Greedy geodesic matching of detected to ground-truth keypoints; IoU in
// [0, 1] = matched / (|detected| + |gt| - matched).
double keypoint_miou(const std::vector<int64_t>& detected, const std::vector<int64_t>& gt,
                     const geom::PointCloud& pc, double geo_threshold);
double keypoint_miou(const std::vector<int64_t>& detected, const std::vector<int64_t>& gt,
                     const geom::KnnGraph& graph, double geo_threshold);

// Fraction (%) of top-n keypoints re-found within dist_threshold after random
// rotations, keypoints of the rotated cloud mapped back through the known
// rotation.
double rotation_repeatability(const model::Detector& detector, const geom::PointCloud& pc,
                              int64_t n_keypoints, double dist_threshold, int n_rotations,
                              uint64_t seed);

enum class UnionMode { kDistinct, kSummed };

// Correspondence-id overlap (%) between two detections of the same shape:
// |intersection| / |union| by default; kSummed divides by |A| + |B| instead.
double correspondence_iou(const std::vector<int64_t>& detected_a, const std::vector<int>& corr_a,
                          const std::vector<int64_t>& detected_b, const std::vector<int>& corr_b,
                          UnionMode mode = UnionMode::kDistinct);

// First k NMS survivors by descending score (ties to the lower index).
std::vector<int64_t> top_k_by_score(const std::vector<geom::Vec3>& points,
                                    const std::vector<float>& saliency, const std::vector<char>& valid,
                                    int64_t k, float nms_radius);

// Seeded K-means with restarts; exposed for tests.
struct KmeansResult {
    std::vector<int> assignment;
    std::vector<geom::Vec3> centroids;
    double inertia = 0.0;
};
KmeansResult kmeans(const std::vector<geom::Vec3>& points, int k, int restarts, uint64_t seed);

}  // namespace ukp::eval
