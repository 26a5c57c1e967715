#include "ukp/model/model.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "ukp/geom/grid_index.hpp"
#include "ukp/geom/lrf.hpp"
#include "ukp/geom/nms.hpp"
#include "ukp/geom/sdv.hpp"

namespace ukp::model {

using ag::Tensor;

namespace {

void parallel_for(int64_t n, int threads, const std::function<void(int64_t, int64_t)>& body) {
    if (threads <= 1 || n < 2) {
        body(0, n);
        return;
    }
    int workers = static_cast<int>(std::min<int64_t>(threads, n));
    std::vector<std::thread> pool;
    int64_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        int64_t lo = w * chunk;
        int64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(body, lo, hi);
    }
    for (auto& t : pool) t.join();
}

}  // namespace

CloudFeatures extract_features(const geom::PointCloud& pc, const RunConfig& cfg, int threads) {
    CloudFeatures out;
    int64_t n = pc.size();
    out.n_points = n;
    out.valid.assign(static_cast<size_t>(n), 1);

    std::vector<float> coords(static_cast<size_t>(3 * n));
    for (int64_t i = 0; i < n; ++i) {
        coords[static_cast<size_t>(i)] = pc.points[static_cast<size_t>(i)].x;
        coords[static_cast<size_t>(n + i)] = pc.points[static_cast<size_t>(i)].y;
        coords[static_cast<size_t>(2 * n + i)] = pc.points[static_cast<size_t>(i)].z;
    }
    out.coords = Tensor::from_data({3, n}, std::move(coords));

    if (cfg.parse_ablations().no_lrf) return out;

    const int w = cfg.sdv_grid;
    const int64_t grid_n = static_cast<int64_t>(w) * w * w;
    std::vector<float> grids(static_cast<size_t>(n * grid_n), 0.0f);

    geom::GridIndex index(pc.points, cfg.lrf_radius);
    geom::SdvConfig sdv_cfg;
    sdv_cfg.grid_width = w;
    sdv_cfg.sigma_voxels = cfg.sdv_sigma_vox;

    parallel_for(n, threads, [&](int64_t lo, int64_t hi) {
        for (int64_t i = lo; i < hi; ++i) {
            auto neigh = index.query_ball(pc.points[static_cast<size_t>(i)], cfg.lrf_radius);
            try {
                geom::LocalReferenceFrame lrf = geom::estimate_lrf(pc, i, neigh);
                geom::SdvDescriptor d = geom::compute_sdv(pc, i, lrf, cfg.lrf_radius, neigh, sdv_cfg);
                std::copy(d.grid.begin(), d.grid.end(), grids.begin() + i * grid_n);
            } catch (const geom::DegenerateLrf&) {
                out.valid[static_cast<size_t>(i)] = 0;  // zero grid stands in
            }
        }
    });

    out.sdv = Tensor::from_data({n, 1, w, w, w}, std::move(grids));
    return out;
}

UkpModel::UkpModel(const RunConfig& cfg, uint64_t init_seed) : cfg_(cfg), ab_(cfg.parse_ablations()) {
    cfg_.validate();
    Rng rng(init_seed);
    const double lg = ag::leaky_gain(cfg_.leaky_slope);

    if (!ab_.no_lrf) {
        int side = cfg_.sdv_grid;
        int cin = 1;
        for (size_t l = 0; l < cfg_.encoder_channels.size(); ++l) {
            int cout = cfg_.encoder_channels[l];
            int stride = cfg_.encoder_strides[l];
            enc_w_.push_back(ag::init_uniform_fanin({cout, cin, 3, 3, 3}, cin * 27, rng, lg));
            enc_b_.push_back(Tensor::zeros({cout, 1, 1, 1}));
            side = (side + 2 - 3) / stride + 1;
            if (side < 1) throw ConfigError("encoder reduces the SDV grid below 1 voxel");
            cin = cout;
        }
        spatial_out_ = side;
    } else {
        int cin = 3;
        std::vector<int> widths = cfg_.xyz_mlp_widths;
        widths.push_back(cfg_.feature_dim());
        for (size_t l = 0; l < widths.size(); ++l) {
            int cout = widths[l];
            double g = l + 1 < widths.size() ? lg : 1.0;
            xyz_w_.push_back(ag::init_uniform_fanin({cout, cin}, cin, rng, g));
            xyz_b_.push_back(Tensor::zeros({cout, 1}));
            cin = cout;
        }
    }

    int c = cfg_.feature_dim();
    for (int width : cfg_.trunk_widths) {
        trunk_w_.push_back(ag::init_uniform_fanin({width, c}, c, rng, lg));
        trunk_b_.push_back(Tensor::zeros({width, 1}));
        c = width;
    }
    // Wide-gain saliency init: per-point logits must start spread out, not as
    // a point mass. The critic's gradient is a function of the value alone,
    // so equal saliencies move in lockstep and a collapsed population gets
    // trapped in local dips of the critic; a spread population straddles the
    // watersheds and lets the adversarial game shape proportions.
    sal_w_ = ag::init_uniform_fanin({1, c}, c, rng, cfg_.sal_init_gain);
    // Center the spread at the prior's mean rather than 0.5.
    double prior_mean = cfg_.beta_alpha / (cfg_.beta_alpha + cfg_.beta_beta);
    prior_mean = std::clamp(prior_mean, 1e-3, 1.0 - 1e-3);
    sal_b_ = Tensor::full({1, 1}, static_cast<float>(std::log(prior_mean / (1.0 - prior_mean))));
    emb_w_ = ag::init_uniform_fanin({cfg_.embed_dim, c}, c, rng);  // linear output
    emb_b_ = Tensor::zeros({cfg_.embed_dim, 1});

    // decoder tree: root fan-out 4 then 8-ary levels; each level's shared MLP
    // reads (node embedding ++ global feature) through 256 and 64 channels
    const int g = cfg_.global_feature_dim();
    int levels = 1;
    for (int64_t leaves = cfg_.decoder_leaves / 4; leaves > 1; leaves /= 8) ++levels;
    for (int l = 0; l < levels; ++l) {
        DecoderLevel lvl;
        bool root = l == 0;
        bool leaf = l == levels - 1;
        lvl.fanout = root ? 4 : 8;
        lvl.out_dim = leaf && levels > 1 ? 3 : (leaf ? 3 : 8);
        int in = root ? g : 8 + g;
        int out = lvl.fanout * lvl.out_dim;
        lvl.w1 = ag::init_uniform_fanin({256, in}, in, rng, lg);
        lvl.b1 = Tensor::zeros({256, 1});
        lvl.w2 = ag::init_uniform_fanin({64, 256}, 256, rng, lg);
        lvl.b2 = Tensor::zeros({64, 1});
        lvl.w3 = ag::init_uniform_fanin({out, 64}, 64, rng);  // pre-sigmoid / embedding output
        lvl.b3 = Tensor::zeros({out, 1});
        dec_levels_.push_back(lvl);
    }

    int cin_c = 1;
    for (size_t l = 0; l < cfg_.critic_channels.size(); ++l) {
        int cout = cfg_.critic_channels[l];
        double g = l + 1 < cfg_.critic_channels.size() ? lg : 1.0;
        critic_w_.push_back(ag::init_uniform_fanin({cout, cin_c}, cin_c, rng, g));
        critic_b_.push_back(Tensor::zeros({cout, 1}));
        cin_c = cout;
    }

    // parameter registry (creation order fixes checkpoint layout)
    auto reg = [&](ag::ParamSet& ps, const std::string& name, Tensor& t) { t = ps.add(name, t); };
    for (size_t l = 0; l < enc_w_.size(); ++l) {
        reg(generator_params_, "encoder.conv" + std::to_string(l) + ".w", enc_w_[l]);
        reg(generator_params_, "encoder.conv" + std::to_string(l) + ".b", enc_b_[l]);
    }
    for (size_t l = 0; l < xyz_w_.size(); ++l) {
        reg(generator_params_, "xyz_mlp." + std::to_string(l) + ".w", xyz_w_[l]);
        reg(generator_params_, "xyz_mlp." + std::to_string(l) + ".b", xyz_b_[l]);
    }
    for (size_t l = 0; l < trunk_w_.size(); ++l) {
        reg(generator_params_, "trunk." + std::to_string(l) + ".w", trunk_w_[l]);
        reg(generator_params_, "trunk." + std::to_string(l) + ".b", trunk_b_[l]);
    }
    reg(generator_params_, "saliency.w", sal_w_);
    reg(generator_params_, "saliency.b", sal_b_);
    reg(generator_params_, "embed.w", emb_w_);
    reg(generator_params_, "embed.b", emb_b_);
    for (size_t l = 0; l < dec_levels_.size(); ++l) {
        std::string p = "decoder.level" + std::to_string(l) + ".";
        reg(generator_params_, p + "w1", dec_levels_[l].w1);
        reg(generator_params_, p + "b1", dec_levels_[l].b1);
        reg(generator_params_, p + "w2", dec_levels_[l].w2);
        reg(generator_params_, p + "b2", dec_levels_[l].b2);
        reg(generator_params_, p + "w3", dec_levels_[l].w3);
        reg(generator_params_, p + "b3", dec_levels_[l].b3);
    }
    for (size_t l = 0; l < critic_w_.size(); ++l) {
        reg(critic_params_, "critic.conv" + std::to_string(l) + ".w", critic_w_[l]);
        reg(critic_params_, "critic.conv" + std::to_string(l) + ".b", critic_b_[l]);
    }
    all_params_.merge("", generator_params_);
    all_params_.merge("", critic_params_);
}

Tensor UkpModel::encode(const CloudFeatures& input) const {
    if (ab_.no_lrf) {
        Tensor x = input.coords;
        for (size_t l = 0; l < xyz_w_.size(); ++l) {
            x = ag::conv1d_pointwise(x, xyz_w_[l], xyz_b_[l]);
            if (l + 1 < xyz_w_.size()) x = ag::leaky_relu(x, cfg_.leaky_slope);
        }
        return x;  // [C x N]
    }
    if (!input.sdv.defined()) throw GraphError("encode: SDV features missing");
    Tensor x = input.sdv;  // [N x 1 x W x W x W]
    for (size_t l = 0; l < enc_w_.size(); ++l) {
        x = ag::conv3d(x, enc_w_[l], cfg_.encoder_strides[l], 1);
        x = ag::add(x, enc_b_[l]);
        x = ag::leaky_relu(x, cfg_.leaky_slope);
    }
    int64_t n = input.n_points;
    int64_t c = cfg_.feature_dim();
    int64_t vox = static_cast<int64_t>(spatial_out_) * spatial_out_ * spatial_out_;
    x = ag::reshape(x, {n, c, vox});
    x = ag::reduce_mean_last(x, 1);  // spatial average -> [N x C]
    return ag::transpose2d(x);       // [C x N]
}

std::pair<Tensor, Tensor> UkpModel::heads(const Tensor& features) const {
    Tensor x = features;
    for (size_t l = 0; l < trunk_w_.size(); ++l)
        x = ag::leaky_relu(ag::conv1d_pointwise(x, trunk_w_[l], trunk_b_[l]), cfg_.leaky_slope);
    // Soft logit clamp c*tanh(z/c): caps saliency at sigmoid(+-c), so logits
    // cannot drift into the f32 dead zone where sigmoid' rounds to zero and
    // points would freeze under Adam for good.
    constexpr float kClamp = 8.0f;
    Tensor logits = ag::conv1d_pointwise(x, sal_w_, sal_b_);
    Tensor tanh_part =
        ag::add_scalar(ag::scale(ag::sigmoid(ag::scale(logits, 2.0f / kClamp)), 2.0f), -1.0f);
    Tensor saliency = ag::sigmoid(ag::scale(tanh_part, kClamp));
    Tensor embeddings = ag::l2_normalize(ag::conv1d_pointwise(x, emb_w_, emb_b_));
    return {saliency, embeddings};
}

Tensor UkpModel::distill(const Tensor& saliency, const Tensor& embeddings) const {
    Tensor pos = ag::reduce_max_over_points(ag::mul(saliency, ag::relu(embeddings)));
    Tensor neg = ag::reduce_max_over_points(ag::mul(saliency, ag::relu(ag::neg(embeddings))));
    Tensor g = ag::concat0(pos, neg);  // [2F]
    return ag::reshape(g, {g.dim(0), 1});
}

Tensor UkpModel::distill_soft(const Tensor& saliency, const Tensor& embeddings, float gamma) const {
    if (gamma < 1.0f) throw GraphError("distill_soft: gamma must be >= 1");
    Tensor wg = ag::signed_pow(saliency, gamma);  // [1 x N], saliency >= 0
    Tensor z = ag::sum_all(wg);
    if (z.item() == 0.0f) return Tensor::zeros({embeddings.dim(0), 1});
    Tensor hg = ag::signed_pow(embeddings, gamma);
    Tensor weighted = ag::mul(wg, hg);  // [F x N]
    Tensor ones = Tensor::full({embeddings.dim(1), 1}, 1.0f);
    Tensor summed = ag::matmul(weighted, ones);            // [F x 1]
    return ag::div(summed, ag::reshape(z, {1, 1}));        // broadcast divide
}

Tensor UkpModel::global_feature(const Tensor& saliency, const Tensor& embeddings) const {
    if (ab_.no_distill) return distill_soft(saliency, embeddings, 1.0f);
    if (cfg_.gamma_mode == "soft") return distill_soft(saliency, embeddings, cfg_.gamma);
    return distill(saliency, embeddings);
}

Tensor UkpModel::decode(const Tensor& global_feature) const {
    if (global_feature.dim(0) != cfg_.global_feature_dim() || global_feature.dim(1) != 1)
        throw DimensionError("decode: global feature must be [" +
                             std::to_string(cfg_.global_feature_dim()) + " x 1]");
    Tensor emb;  // [8 x nodes]
    for (size_t l = 0; l < dec_levels_.size(); ++l) {
        const DecoderLevel& lvl = dec_levels_[l];
        Tensor in;
        int64_t nodes;
        if (l == 0) {
            in = global_feature;
            nodes = 1;
        } else {
            nodes = emb.dim(1);
            Tensor tiled = ag::add(Tensor::zeros({global_feature.dim(0), nodes}), global_feature);
            in = ag::concat0(emb, tiled);  // [(8+G) x nodes]
        }
        Tensor h = ag::leaky_relu(ag::conv1d_pointwise(in, lvl.w1, lvl.b1), cfg_.leaky_slope);
        h = ag::leaky_relu(ag::conv1d_pointwise(h, lvl.w2, lvl.b2), cfg_.leaky_slope);
        Tensor out = ag::conv1d_pointwise(h, lvl.w3, lvl.b3);  // [(fanout*dim) x nodes]
        // regroup children as columns: [dim x fanout*nodes]
        Tensor t = ag::transpose2d(out);                                  // [nodes x fanout*dim]
        t = ag::reshape(t, {nodes * lvl.fanout, lvl.out_dim});            // child rows
        emb = ag::transpose2d(t);                                         // [dim x children]
    }
    // squash into the normalized coordinate box (-1, 1)
    return ag::add_scalar(ag::scale(ag::sigmoid(emb), 2.0f), -1.0f);
}

Tensor UkpModel::critic_score(const Tensor& saliency_row) const {
    if (saliency_row.rank() != 2 || saliency_row.dim(0) != 1)
        throw DimensionError("critic_score: expected [1 x N]");
    // Per-point layers, a pool over points, then the final layer maps the
    // pooled feature to the scalar. Mean pooling makes the critic a witness
    // of the per-point value distribution (it can see proportions, which the
    // Beta prior match requires); max pooling only tests value presence and
    // measurably fails to separate a collapsed saliency vector from the
    // prior, so mean is the default.
    Tensor x = saliency_row;
    for (size_t l = 0; l + 1 < critic_w_.size(); ++l)
        x = ag::leaky_relu(ag::conv1d_pointwise(x, critic_w_[l], critic_b_[l]), cfg_.leaky_slope);
    Tensor pooled;
    if (cfg_.critic_pool == "max") {
        pooled = ag::reshape(ag::reduce_max_over_points(x), {x.dim(0), 1});
    } else {
        Tensor ones = Tensor::full({x.dim(1), 1}, 1.0f / static_cast<float>(x.dim(1)));
        pooled = ag::matmul(x, ones);  // [C x 1] mean over points
    }
    Tensor score = ag::conv1d_pointwise(pooled, critic_w_.back(), critic_b_.back());  // [1 x 1]
    return ag::reshape(score, {1});
}

void UkpModel::save(const std::string& path) const { ag::save_params(path, all_params_); }

void UkpModel::load(const std::string& path) { ag::load_params(path, all_params_); }

InferenceOutput infer(const UkpModel& model, const geom::PointCloud& pc, int threads) {
    ag::NoRecordGuard guard;
    CloudFeatures feats = extract_features(pc, model.config(), threads);
    Tensor f = model.encode(feats);
    auto [saliency, embeddings] = model.heads(f);
    InferenceOutput out;
    out.saliency = saliency.vec();
    int64_t n = pc.size();
    int64_t fd = embeddings.dim(0);
    out.embeddings.resize(static_cast<size_t>(n * fd));
    const float* e = embeddings.data();
    for (int64_t i = 0; i < n; ++i)
        for (int64_t d = 0; d < fd; ++d) out.embeddings[static_cast<size_t>(i * fd + d)] = e[d * n + i];
    out.valid = feats.valid;
    return out;
}

DetectionResult detect(const UkpModel& model, const geom::PointCloud& pc, float nms_radius,
                       float threshold, int64_t top_k, ThresholdMode mode, int threads,
                       bool keep_embeddings) {
    InferenceOutput inf = infer(model, pc, threads);
    float thr = threshold;
    if (mode == ThresholdMode::kHalfMax) {
        float peak = 0.0f;
        for (int64_t i = 0; i < pc.size(); ++i)
            if (inf.valid[static_cast<size_t>(i)]) peak = std::max(peak, inf.saliency[static_cast<size_t>(i)]);
        thr = 0.5f * peak;
    }
    auto kept = geom::nms(pc.points, inf.saliency, nms_radius, thr, inf.valid);
    if (top_k >= 0) {
        if (static_cast<int64_t>(kept.size()) < top_k)
            throw MetricError("detector produced " + std::to_string(kept.size()) + " keypoints, need " +
                              std::to_string(top_k));
        kept.resize(static_cast<size_t>(top_k));
    }
    DetectionResult r;
    r.keypoint_indices = kept;
    for (int64_t i : kept) r.scores.push_back(inf.saliency[static_cast<size_t>(i)]);
    if (keep_embeddings) {
        r.embeddings = std::move(inf.embeddings);
        r.embed_dim = model.config().embed_dim;
    }
    return r;
}

}  // namespace ukp::model
