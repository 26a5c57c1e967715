#include "ukp/ag/adam.hpp"

#include <cmath>

namespace ukp::ag {

void Adam::step(ParamSet& params) {
    if (m_.empty()) {
        m_.resize(params.size());
        v_.resize(params.size());
        for (size_t i = 0; i < params.size(); ++i) {
            m_[i].assign(static_cast<size_t>(params.tensor(i).numel()), 0.0f);
            v_[i].assign(static_cast<size_t>(params.tensor(i).numel()), 0.0f);
        }
    }
    if (m_.size() != params.size()) throw TrainingError("adam: optimizer state does not match parameter set");

    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));

    for (size_t i = 0; i < params.size(); ++i) {
        Tensor& p = params.tensor(i);
        Tensor g = p.grad();
        float* pd = p.data_mut();
        int64_t n = p.numel();
        const float* gd = nullptr;
        if (g.defined()) {
            if (g.shape() != p.shape())
                throw TrainingError("adam: gradient shape mismatch for " + params.name(i));
            gd = g.data();
        }
        float* mi = m_[i].data();
        float* vi = v_[i].data();
        for (int64_t j = 0; j < n; ++j) {
            double gj = gd ? static_cast<double>(gd[j]) : 0.0;
            if (!std::isfinite(gj))
                throw TrainingError("adam: non-finite gradient in parameter " + params.name(i));
            double mj = beta1_ * mi[j] + (1.0 - beta1_) * gj;
            double vj = beta2_ * vi[j] + (1.0 - beta2_) * gj * gj;
            mi[j] = static_cast<float>(mj);
            vi[j] = static_cast<float>(vj);
            double mhat = mj / bc1;
            double vhat = vj / bc2;
            pd[j] = static_cast<float>(pd[j] - lr_ * mhat / (std::sqrt(vhat) + eps_));
        }
    }
}

void Adam::restore(std::vector<std::vector<float>> m, std::vector<std::vector<float>> v, int64_t t) {
    m_ = std::move(m);
    v_ = std::move(v);
    t_ = t;
}

}  // namespace ukp::ag
