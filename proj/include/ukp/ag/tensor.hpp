#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ukp/errors.hpp"

namespace ukp::ag {

using Shape = std::vector<int64_t>;

int64_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

class Tensor;

// One recorded operation (or leaf) on the tape. Nodes are created in program
// order; creation ids give a topological order of the graph, so backward can
// simply walk ids in descending order and visit each node exactly once.
struct Node {
    Shape shape;
    std::shared_ptr<std::vector<float>> data;
    bool requires_grad = false;
    uint64_t id = 0;
    std::string op_name;  // empty for leaves
    std::vector<std::shared_ptr<Node>> parents;
    // Returns one gradient per parent (same order). Empty tensors mean
    // "no gradient for this parent".
    std::function<std::vector<Tensor>(const Tensor& grad_out)> backward_fn;
    // Gradient accumulator, populated by Tape::backward for leaf tensors.
    std::shared_ptr<Node> grad_slot;
};

// Dense row-major f32 tensor handle. Copies are shallow (shared node).
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(const Shape& shape);
    static Tensor full(const Shape& shape, float value);
    static Tensor from_data(const Shape& shape, std::vector<float> data);
    static Tensor scalar(float value);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const;
    int64_t numel() const;
    int64_t dim(size_t i) const { return shape().at(i); }
    size_t rank() const { return shape().size(); }

    const float* data() const;
    float* data_mut();  // leaf initialization only; never mutate op results
    const std::vector<float>& vec() const;

    float item() const;  // value of a single-element tensor

    bool requires_grad() const;
    Tensor& set_requires_grad(bool rg);

    // Value copy detached from the graph (no parents, no grad).
    Tensor detach() const;

    // Accumulated gradient after Tape::backward (leaf tensors only).
    Tensor grad() const;
    void zero_grad();

    std::shared_ptr<Node> node() const { return node_; }
    explicit Tensor(std::shared_ptr<Node> n) : node_(std::move(n)) {}

private:
    std::shared_ptr<Node> node_;
};

// While an instance is alive, newly created ops do not record parents or
// backward functions; results are plain values. Used inside backward passes
// (unless create_graph) and for inference.
class NoRecordGuard {
public:
    NoRecordGuard();
    ~NoRecordGuard();
    NoRecordGuard(const NoRecordGuard&) = delete;
    NoRecordGuard& operator=(const NoRecordGuard&) = delete;

private:
    bool prev_;
};

bool recording_enabled();

// Reverse-mode pass over the recorded graph.
namespace tape {

// Accumulates gradients of `scalar` into the grad slots of every reachable
// leaf with requires_grad set.
void backward(const Tensor& scalar);

// Functional form: returns d scalar / d wrt without touching grad slots.
// With create_graph the result is itself differentiable (the backward
// computation is recorded), which is what the gradient penalty needs.
Tensor grad_of_scalar_wrt(const Tensor& scalar, const Tensor& wrt, bool create_graph = false);

}  // namespace tape

// Internal: construct an op result node. Exposed for the op implementations.
Tensor make_op(const Shape& shape, std::vector<float> data, const char* op_name,
               std::vector<Tensor> inputs,
               std::function<std::vector<Tensor>(const Tensor&)> backward_fn);

}  // namespace ukp::ag
