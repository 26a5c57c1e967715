#include "ukp/ag/params.hpp"

#include <cmath>

namespace ukp::ag {

Tensor& ParamSet::add(const std::string& name, Tensor t) {
    if (find(name)) throw GraphError("duplicate parameter name: " + name);
    t.set_requires_grad(true);
    names_.push_back(name);
    tensors_.push_back(std::move(t));
    return tensors_.back();
}

Tensor* ParamSet::find(const std::string& name) {
    for (size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return &tensors_[i];
    return nullptr;
}

const Tensor* ParamSet::find(const std::string& name) const {
    for (size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return &tensors_[i];
    return nullptr;
}

void ParamSet::merge(const std::string& prefix, const ParamSet& other) {
    for (size_t i = 0; i < other.size(); ++i) {
        if (find(prefix + other.name(i))) throw GraphError("duplicate parameter name: " + prefix + other.name(i));
        names_.push_back(prefix + other.name(i));
        tensors_.push_back(other.tensor(i));
    }
}

void ParamSet::zero_grads() {
    for (auto& t : tensors_) t.zero_grad();
}

int64_t ParamSet::total_elements() const {
    int64_t n = 0;
    for (const auto& t : tensors_) n += t.numel();
    return n;
}

Tensor init_uniform_fanin(const Shape& shape, int64_t fan_in, Rng& rng, double gain) {
    double limit = gain * std::sqrt(3.0 / static_cast<double>(fan_in > 0 ? fan_in : 1));
    std::vector<float> data(static_cast<size_t>(shape_numel(shape)));
    for (auto& v : data) v = static_cast<float>(rng.uniform(-limit, limit));
    return Tensor::from_data(shape, std::move(data));
}

double leaky_gain(double slope) { return std::sqrt(2.0 / (1.0 + slope * slope)); }

}  // namespace ukp::ag
