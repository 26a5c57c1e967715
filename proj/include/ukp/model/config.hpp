#pragma once

#include <string>
#include <vector>

#include "ukp/errors.hpp"

namespace ukp::model {

struct Ablations {
    bool no_gan = false;
    bool no_distill = false;
    bool no_lrf = false;
    bool no_sym = false;
};

// Every tunable of the pipeline, serialized as "key = value" lines with "#"
// comments. Defaults follow the reference architecture; desk-scale runs
// override through a config file or CLI flags. Unknown keys are rejected.
struct RunConfig {
    // geometry features
    int sdv_grid = 16;
    float lrf_radius = 0.3f;
    float sdv_sigma_vox = 0.75f;

    // model
    std::vector<int> encoder_channels = {32, 32, 64, 64, 128, 128, 128};
    std::vector<int> encoder_strides = {1, 2, 1, 2, 1, 2, 1};
    std::vector<int> trunk_widths = {512, 256};
    int embed_dim = 128;
    std::vector<int> critic_channels = {512, 256, 128, 64, 1};
    std::string critic_pool = "mean";  // "mean" or "max" aggregation over points
    int decoder_leaves = 2048;
    float leaky_slope = 0.2f;
    float beta_alpha = 0.01f;
    float beta_beta = 0.05f;
    std::string gamma_mode = "max";  // "max" (signed max pooling) or "soft"
    float gamma = 1.0f;              // temperature when gamma_mode = soft
    std::vector<int> xyz_mlp_widths = {64, 128};  // no_lrf per-point MLP
    float sal_init_gain = 6.0f;  // initial spread of saliency logits

    // training
    float lr = 1e-4f;
    float critic_lr = 0.0f;  // 0 means: use lr
    int batch_size = 8;
    int critic_steps_per_gen = 5;
    int critic_warmup_steps = 100;  // critic-only steps before the first generator update
    int epochs = 300;
    uint64_t seed = 1234;
    float beta1_recon = 10.0f;
    float beta2_gan = 1.0f;
    float beta3_sym = 0.1f;
    float lambda_gp = 1.0f;
    float adam_beta1 = 0.9f;
    float adam_beta2 = 0.999f;
    float adam_eps = 1e-8f;
    std::string ablations;  // comma list: no_gan,no_distill,no_lrf,no_sym

    // detection
    float nms_radius = 0.1f;
    float threshold = 0.5f;

    // runtime
    int threads = 1;

    Ablations parse_ablations() const;
    void set_ablation(const std::string& name);

    // encoder output width (the per-point feature dimension)
    int feature_dim() const { return encoder_channels.empty() ? 0 : encoder_channels.back(); }
    // distilled global feature width
    int global_feature_dim() const { return parse_ablations().no_distill ? embed_dim : 2 * embed_dim; }

    void validate() const;
};

// File layer: defaults < config file < explicit overrides.
RunConfig load_config(const std::string& path);
void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value);
void merge_config_file(RunConfig& cfg, const std::string& path,
                       std::vector<std::string>* applied_keys = nullptr);
void save_config(const std::string& path, const RunConfig& cfg);

}  // namespace ukp::model
