#pragma once

#include <vector>

#include "ukp/ag/params.hpp"

namespace ukp::ag {

// Adaptive-moment optimizer with bias correction. Moments persist across
// steps and can be saved/restored next to the model checkpoint.
class Adam {
public:
    explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    // Applies one update using each parameter's accumulated gradient.
    // Parameters without a gradient are treated as having zero gradient.
    // A non-finite gradient aborts with the offending parameter's name.
    void step(ParamSet& params);

    int64_t step_count() const { return t_; }
    double lr() const { return lr_; }
    void set_lr(double lr) { lr_ = lr; }

    // State access for checkpointing (aligned with the ParamSet order).
    const std::vector<std::vector<float>>& m() const { return m_; }
    const std::vector<std::vector<float>>& v() const { return v_; }
    void restore(std::vector<std::vector<float>> m, std::vector<std::vector<float>> v, int64_t t);

private:
    double lr_, beta1_, beta2_, eps_;
    int64_t t_ = 0;
    std::vector<std::vector<float>> m_, v_;
};

}  // namespace ukp::ag
