#include "ukp/model/beta.hpp"

#include "ukp/errors.hpp"

namespace ukp::model {

std::vector<float> sample_beta_prior(const BetaPrior& prior, int64_t n, Rng& rng) {
    if (n < 1) throw TrainingError("sample_beta_prior: n must be >= 1");
    if (prior.alpha <= 0.0 || prior.beta <= 0.0)
        throw TrainingError("sample_beta_prior: shape parameters must be positive");
    std::vector<float> out(static_cast<size_t>(n));
    for (auto& v : out) v = static_cast<float>(rng.beta(prior.alpha, prior.beta));
    return out;
}

}  // namespace ukp::model
