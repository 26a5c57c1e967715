#include "ukp/train/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ukp/ag/adam.hpp"
#include "ukp/geom/symmetry.hpp"
#include "ukp/model/beta.hpp"
#include "ukp/train/losses.hpp"

namespace ukp::train {

namespace fs = std::filesystem;
using ag::Tensor;
using model::CloudFeatures;

namespace {

struct CloudCache {
    CloudFeatures features;
    std::vector<std::pair<int64_t, int64_t>> sym_pairs;
    std::vector<geom::Vec3> target;
};

}  // namespace

TrainResult train(model::UkpModel& model, const std::vector<geom::PointCloud>& dataset,
                  const model::RunConfig& cfg, const std::string& out_dir, bool verbose) {
    if (dataset.empty()) throw TrainingError("train: empty dataset");
    model::Ablations ab = cfg.parse_ablations();

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);

    // one-time per-cloud preprocessing
    std::vector<CloudCache> cache(dataset.size());
    for (size_t i = 0; i < dataset.size(); ++i) {
        cache[i].features = model::extract_features(dataset[i], cfg, cfg.threads);
        cache[i].target = dataset[i].points;
        if (!ab.no_sym && cfg.beta3_sym > 0.0f && dataset[i].symmetry_plane) {
            float tol = 2.0f * geom::median_nn_spacing(dataset[i]);
            cache[i].sym_pairs = geom::symmetric_pairs(dataset[i], *dataset[i].symmetry_plane, tol);
        }
    }

    ag::Adam gen_opt(cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
    ag::Adam critic_opt(cfg.critic_lr > 0.0f ? cfg.critic_lr : cfg.lr, cfg.adam_beta1, cfg.adam_beta2,
                        cfg.adam_eps);
    Rng rng(cfg.seed);
    model::BetaPrior prior{cfg.beta_alpha, cfg.beta_beta};

    TrainResult result;
    result.log_path = (fs::path(out_dir) / "train_log.csv").string();
    std::ofstream log(result.log_path, std::ios::trunc);
    if (!log) throw IoError("cannot open " + result.log_path);
    log << "epoch,step,l_recon,l_gan_g,l_gan_d,l_sym,grad_penalty\n";

    std::vector<int64_t> order(dataset.size());
    for (size_t i = 0; i < dataset.size(); ++i) order[i] = static_cast<int64_t>(i);

    // Critic warm-up: shape the value landscape before the generator first
    // moves, so initially-high saliencies are pulled toward 1 rather than
    // dragged across the mid-value desert where the prior has no mass.
    if (!ab.no_gan && cfg.critic_warmup_steps > 0) {
        std::vector<std::vector<float>> fake_rows;
        {
            ag::NoRecordGuard guard;
            for (const CloudCache& cc : cache) {
                Tensor f = model.encode(cc.features);
                auto [s, e] = model.heads(f);
                fake_rows.push_back(s.vec());
                if (fake_rows.size() >= static_cast<size_t>(cfg.batch_size)) break;
            }
        }
        for (int t = 0; t < cfg.critic_warmup_steps; ++t) {
            std::vector<std::vector<float>> real_rows(fake_rows.size());
            for (size_t b = 0; b < fake_rows.size(); ++b)
                real_rows[b] =
                    model::sample_beta_prior(prior, static_cast<int64_t>(fake_rows[b].size()), rng);
            CriticLoss cl = critic_loss(real_rows, fake_rows, model, cfg.lambda_gp, rng);
            ag::tape::backward(cl.total);
            critic_opt.step(model.critic_params());
            model.critic_params().zero_grads();
        }
    }

    int global_step = 0;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double ep_recon = 0, ep_gan_g = 0, ep_gan_d = 0, ep_sym = 0, ep_pen = 0;
        int ep_steps = 0;

        for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
            size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
            std::vector<int64_t> batch(order.begin() + static_cast<int64_t>(start),
                                       order.begin() + static_cast<int64_t>(end));
            ++global_step;

            try {
                // forward pass for the whole batch (kept for the generator step)
                std::vector<Tensor> saliency(batch.size()), embeddings(batch.size());
                for (size_t b = 0; b < batch.size(); ++b) {
                    const CloudCache& cc = cache[static_cast<size_t>(batch[b])];
                    Tensor f = model.encode(cc.features);
                    auto [s, e] = model.heads(f);
                    saliency[b] = s;
                    embeddings[b] = e;
                }

                float l_gan_d = 0.0f, penalty = 0.0f;
                if (!ab.no_gan) {
                    std::vector<std::vector<float>> fake_rows(batch.size());
                    for (size_t b = 0; b < batch.size(); ++b) fake_rows[b] = saliency[b].vec();
                    for (int t = 0; t < cfg.critic_steps_per_gen; ++t) {
                        std::vector<std::vector<float>> real_rows(batch.size());
                        for (size_t b = 0; b < batch.size(); ++b)
                            real_rows[b] = model::sample_beta_prior(
                                prior, static_cast<int64_t>(fake_rows[b].size()), rng);
                        CriticLoss cl = critic_loss(real_rows, fake_rows, model, cfg.lambda_gp, rng);
                        ag::tape::backward(cl.total);
                        critic_opt.step(model.critic_params());
                        model.critic_params().zero_grads();
                        l_gan_d = cl.total.item();
                        penalty = cl.penalty;
                    }
                }

                // generator objective
                Tensor recon_sum = Tensor::zeros({1});
                Tensor sym_sum = Tensor::zeros({1});
                for (size_t b = 0; b < batch.size(); ++b) {
                    const CloudCache& cc = cache[static_cast<size_t>(batch[b])];
                    recon_sum = ag::add(recon_sum, recon_loss(model, saliency[b], embeddings[b], cc.target));
                    if (!ab.no_sym && cfg.beta3_sym > 0.0f)
                        sym_sum = ag::add(sym_sum, sym_loss(saliency[b], embeddings[b], cc.sym_pairs));
                }
                float inv_b = 1.0f / static_cast<float>(batch.size());
                Tensor l_recon = ag::scale(recon_sum, inv_b);
                Tensor l_sym = ag::scale(sym_sum, inv_b);

                Tensor l_gan_g;
                if (ab.no_gan) {
                    // L1 sparsity baseline in place of the adversarial term
                    Tensor s = Tensor::zeros({1});
                    for (const Tensor& row : saliency) s = ag::add(s, ag::mean_all(row));
                    l_gan_g = ag::scale(s, inv_b);
                } else {
                    l_gan_g = generator_gan_loss(saliency, model);
                }

                Tensor total = ag::add(
                    ag::add(ag::scale(l_recon, cfg.beta1_recon), ag::scale(l_gan_g, cfg.beta2_gan)),
                    ag::scale(l_sym, cfg.beta3_sym));
                if (!std::isfinite(total.item())) throw TrainingError("non-finite generator loss");

                ag::tape::backward(total);
                gen_opt.step(model.generator_params());
                model.all_params().zero_grads();

                StepLog s;
                s.epoch = epoch;
                s.step = global_step;
                s.l_recon = l_recon.item();
                s.l_gan_g = l_gan_g.item();
                s.l_gan_d = l_gan_d;
                s.l_sym = l_sym.item();
                s.grad_penalty = penalty;
                s.total = total.item();
                result.steps.push_back(s);
                char line[256];
                std::snprintf(line, sizeof(line), "%d,%d,%.6g,%.6g,%.6g,%.6g,%.6g\n", s.epoch, s.step,
                              static_cast<double>(s.l_recon), static_cast<double>(s.l_gan_g),
                              static_cast<double>(s.l_gan_d), static_cast<double>(s.l_sym),
                              static_cast<double>(s.grad_penalty));
                log << line;

                ep_recon += s.l_recon;
                ep_gan_g += s.l_gan_g;
                ep_gan_d += s.l_gan_d;
                ep_sym += s.l_sym;
                ep_pen += s.grad_penalty;
                ++ep_steps;
            } catch (const TrainingError& e) {
                throw TrainingError("epoch " + std::to_string(epoch) + " step " +
                                    std::to_string(global_step) + ": " + e.what());
            }
        }

        model.save((fs::path(out_dir) / "checkpoint.ukpf").string());
        ag::save_adam_state((fs::path(out_dir) / "checkpoint.adam-gen.ukpf").string(), gen_opt,
                            model.generator_params());
        if (!ab.no_gan)
            ag::save_adam_state((fs::path(out_dir) / "checkpoint.adam-critic.ukpf").string(), critic_opt,
                                model.critic_params());
        if (verbose) {
            double n = std::max(1, ep_steps);
            std::printf("epoch %3d  recon %.5f  gan_g %.5f  gan_d %.5f  sym %.5f  gp %.5f\n", epoch,
                        ep_recon / n, ep_gan_g / n, ep_gan_d / n, ep_sym / n, ep_pen / n);
            std::fflush(stdout);
        }
    }

    result.model_path = (fs::path(out_dir) / "model.ukpf").string();
    model.save(result.model_path);
    log.close();
    return result;
}

}  // namespace ukp::train
