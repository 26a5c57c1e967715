#pragma once

#include <string>
#include <vector>

#include "ukp/model/model.hpp"

namespace ukp::train {

struct StepLog {
    int epoch = 0;
    int step = 0;
    float l_recon = 0.0f;
    float l_gan_g = 0.0f;   // L1 penalty value under the no_gan ablation
    float l_gan_d = 0.0f;
    float l_sym = 0.0f;
    float grad_penalty = 0.0f;
    float total = 0.0f;     // the generator objective actually optimized
};

struct TrainResult {
    std::vector<StepLog> steps;
    std::string model_path;
    std::string log_path;
};

// Alternating WGAN-GP loop: critic_steps_per_gen critic updates per generator
// update on beta1*L_recon + beta2*L_GAN + beta3*L_sym. Deterministic for a
// fixed seed at thread count 1. Checkpoints are written every epoch; the
// metrics log is CSV(epoch, step, l_recon, l_gan_g, l_gan_d, l_sym,
// grad_penalty).
TrainResult train(model::UkpModel& model, const std::vector<geom::PointCloud>& dataset,
                  const model::RunConfig& cfg, const std::string& out_dir, bool verbose = true);

}  // namespace ukp::train
