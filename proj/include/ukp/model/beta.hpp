#pragma once

#include <vector>

#include "ukp/rng.hpp"

namespace ukp::model {

// Bimodal prior on keypoint probabilities. Small alpha and beta pile the
// density onto 0 and 1; alpha/(alpha+beta) sets the share near 1.
struct BetaPrior {
    double alpha = 0.01;
    double beta = 0.05;
};

// n i.i.d. Beta(alpha, beta) draws via the Gamma-ratio construction.
std::vector<float> sample_beta_prior(const BetaPrior& prior, int64_t n, Rng& rng);

}  // namespace ukp::model
