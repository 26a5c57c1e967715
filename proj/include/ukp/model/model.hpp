#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ukp/ag/checkpoint.hpp"
#include "ukp/ag/ops.hpp"
#include "ukp/ag/params.hpp"
#include "ukp/geom/point_cloud.hpp"
#include "ukp/model/config.hpp"

namespace ukp::model {

// Per-cloud network input: cached SDV grids (or raw coordinates for the
// no_lrf ablation), the normalized coordinates, and the non-degenerate mask.
struct CloudFeatures {
    ag::Tensor sdv;            // [N x 1 x W x W x W]; undefined when no_lrf
    ag::Tensor coords;         // [3 x N]
    std::vector<char> valid;   // 0 where the LRF was degenerate
    int64_t n_points = 0;
};

CloudFeatures extract_features(const geom::PointCloud& pc, const RunConfig& cfg, int threads = 1);

// Saliency/embedding detector with GAN-driven sparsity and a tree decoder.
class UkpModel {
public:
    UkpModel(const RunConfig& cfg, uint64_t init_seed);

    // SDV grids (or coords under no_lrf) -> per-point features [C x N].
    ag::Tensor encode(const CloudFeatures& input) const;
    // features -> (saliency [1 x N] in [0,1], unit embeddings [F x N])
    std::pair<ag::Tensor, ag::Tensor> heads(const ag::Tensor& features) const;
    // signed max-pooled global feature [2F x 1] (gamma = infinity limit)
    ag::Tensor distill(const ag::Tensor& saliency, const ag::Tensor& embeddings) const;
    // tempered expectation [F x 1]; gamma = 1 reproduces the plain
    // saliency-weighted average
    ag::Tensor distill_soft(const ag::Tensor& saliency, const ag::Tensor& embeddings, float gamma) const;
    // global feature -> decoded point set [3 x leaves]
    ag::Tensor decode(const ag::Tensor& global_feature) const;
    // saliency row [1 x N] -> scalar critic score [1]
    ag::Tensor critic_score(const ag::Tensor& saliency_row) const;

    // distill or distill_soft following the configured mode/ablation
    ag::Tensor global_feature(const ag::Tensor& saliency, const ag::Tensor& embeddings) const;

    ag::ParamSet& generator_params() { return generator_params_; }
    ag::ParamSet& critic_params() { return critic_params_; }
    ag::ParamSet& all_params() { return all_params_; }
    const RunConfig& config() const { return cfg_; }

    void save(const std::string& path) const;
    void load(const std::string& path);

private:
    RunConfig cfg_;
    Ablations ab_;
    int spatial_out_ = 1;  // encoder spatial size after the conv stack

    ag::ParamSet generator_params_;
    ag::ParamSet critic_params_;
    ag::ParamSet all_params_;

    std::vector<ag::Tensor> enc_w_, enc_b_;
    std::vector<ag::Tensor> xyz_w_, xyz_b_;
    std::vector<ag::Tensor> trunk_w_, trunk_b_;
    ag::Tensor sal_w_, sal_b_, emb_w_, emb_b_;
    struct DecoderLevel {
        ag::Tensor w1, b1, w2, b2, w3, b3;
        int fanout = 8;
        int out_dim = 8;  // per-child output width (8 internal, 3 leaf)
    };
    std::vector<DecoderLevel> dec_levels_;
    std::vector<ag::Tensor> critic_w_, critic_b_;
};

// Full inference on one cloud (no gradients recorded).
struct InferenceOutput {
    std::vector<float> saliency;    // N
    std::vector<float> embeddings;  // N x F row-major
    std::vector<char> valid;
};
InferenceOutput infer(const UkpModel& model, const geom::PointCloud& pc, int threads = 1);

// NMS-filtered keypoints of one cloud, scores descending.
struct DetectionResult {
    std::string cloud_id;
    std::vector<int64_t> keypoint_indices;
    std::vector<float> scores;
    std::vector<float> embeddings;  // optional, N x F of all points
    int64_t embed_dim = 0;
};

enum class ThresholdMode { kAbsolute, kHalfMax };

DetectionResult detect(const UkpModel& model, const geom::PointCloud& pc, float nms_radius,
                       float threshold, int64_t top_k = -1,
                       ThresholdMode mode = ThresholdMode::kAbsolute, int threads = 1,
                       bool keep_embeddings = false);

using Detector = std::function<DetectionResult(const geom::PointCloud&)>;

}  // namespace ukp::model
