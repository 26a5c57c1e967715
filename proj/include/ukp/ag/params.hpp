#pragma once

#include <string>
#include <vector>

#include "ukp/ag/tensor.hpp"
#include "ukp/rng.hpp"

namespace ukp::ag {

// Ordered, named parameter collection. Order is creation order and is stable,
// which keeps checkpoints and optimizer state aligned.
class ParamSet {
public:
    Tensor& add(const std::string& name, Tensor t);
    Tensor* find(const std::string& name);
    const Tensor* find(const std::string& name) const;

    size_t size() const { return tensors_.size(); }
    const std::string& name(size_t i) const { return names_[i]; }
    Tensor& tensor(size_t i) { return tensors_[i]; }
    const Tensor& tensor(size_t i) const { return tensors_[i]; }

    // Absorb another set, prefixing its names ("encoder.conv0.w" style).
    void merge(const std::string& prefix, const ParamSet& other);

    void zero_grads();
    int64_t total_elements() const;

private:
    std::vector<std::string> names_;
    std::vector<Tensor> tensors_;
};

// Kaiming-style uniform init: limit = gain * sqrt(3 / fan_in). gain = 1 for
// linear outputs; layers feeding a leaky ReLU use leaky_gain(slope) so the
// activation scale carries through deep stacks.
Tensor init_uniform_fanin(const Shape& shape, int64_t fan_in, Rng& rng, double gain = 1.0);
double leaky_gain(double slope);

}  // namespace ukp::ag
