#pragma once

#include <utility>
#include <vector>

#include "ukp/model/model.hpp"

namespace ukp::train {

// Chamfer loss between a decoded [3 x M] tensor and a fixed target cloud.
// Nearest-neighbor matches are computed on values and held fixed, which is
// the usual (a.e. exact) subgradient of the Chamfer objective.
ag::Tensor chamfer_loss(const ag::Tensor& decoded, const std::vector<geom::Vec3>& target);

// Reconstruction objective: decode the distilled global feature, compare to
// the input points.
ag::Tensor recon_loss(const model::UkpModel& model, const ag::Tensor& saliency,
                      const ag::Tensor& embeddings, const std::vector<geom::Vec3>& target);

// WGAN-GP critic objective on a batch:
//   mean D(fake) - mean D(real) + lambda * mean (||d D/d xhat||_2 - 1)^2
// with xhat = eps*real + (1-eps)*fake, eps ~ U(0,1) per sample. Fake rows are
// value-only (detached); the penalty uses double backprop via the tape.
struct CriticLoss {
    ag::Tensor total;
    float wasserstein = 0.0f;
    float penalty = 0.0f;
};
CriticLoss critic_loss(const std::vector<std::vector<float>>& real_rows,
                       const std::vector<std::vector<float>>& fake_rows, const model::UkpModel& model,
                       float lambda_gp, Rng& rng);

// Generator side of the adversarial pair: -mean D(fake) with gradients
// flowing into the saliency head.
ag::Tensor generator_gan_loss(const std::vector<ag::Tensor>& fake_rows, const model::UkpModel& model);

// Mirror-pair regularizer: (1/|S|) sum |phi_i - phi_j| + ||h_i - h_j||_1.
// Zero when the pair list is empty.
ag::Tensor sym_loss(const ag::Tensor& saliency, const ag::Tensor& embeddings,
                    const std::vector<std::pair<int64_t, int64_t>>& pairs);

}  // namespace ukp::train
