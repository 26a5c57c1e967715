#include "ukp/ag/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ukp/ag/ops.hpp"

namespace ukp::ag {

namespace {

std::atomic<uint64_t> g_next_id{1};
thread_local bool g_recording = true;

std::shared_ptr<Node> new_node(Shape shape, std::vector<float> data) {
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->data = std::make_shared<std::vector<float>>(std::move(data));
    n->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
    return n;
}

}  // namespace

int64_t shape_numel(const Shape& s) {
    int64_t n = 1;
    for (int64_t d : s) n *= d;
    return n;
}

std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << "]";
    return os.str();
}

Tensor Tensor::zeros(const Shape& shape) {
    return Tensor(new_node(shape, std::vector<float>(static_cast<size_t>(shape_numel(shape)), 0.0f)));
}

Tensor Tensor::full(const Shape& shape, float value) {
    return Tensor(new_node(shape, std::vector<float>(static_cast<size_t>(shape_numel(shape)), value)));
}

Tensor Tensor::from_data(const Shape& shape, std::vector<float> data) {
    if (shape_numel(shape) != static_cast<int64_t>(data.size()))
        throw DimensionError("from_data: shape " + shape_str(shape) + " does not match data size " +
                             std::to_string(data.size()));
    return Tensor(new_node(shape, std::move(data)));
}

Tensor Tensor::scalar(float value) { return from_data({1}, {value}); }

const Shape& Tensor::shape() const {
    if (!node_) throw GraphError("use of undefined tensor");
    return node_->shape;
}

int64_t Tensor::numel() const { return shape_numel(shape()); }

const float* Tensor::data() const {
    if (!node_) throw GraphError("use of undefined tensor");
    return node_->data->data();
}

float* Tensor::data_mut() {
    if (!node_) throw GraphError("use of undefined tensor");
    return node_->data->data();
}

const std::vector<float>& Tensor::vec() const {
    if (!node_) throw GraphError("use of undefined tensor");
    return *node_->data;
}

float Tensor::item() const {
    if (numel() != 1) throw DimensionError("item() on tensor of shape " + shape_str(shape()));
    return (*node_->data)[0];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

Tensor& Tensor::set_requires_grad(bool rg) {
    if (!node_) throw GraphError("set_requires_grad on undefined tensor");
    if (rg && node_->backward_fn)
        throw GraphError("set_requires_grad: only leaf tensors can be marked");
    node_->requires_grad = rg;
    return *this;
}

Tensor Tensor::detach() const {
    if (!node_) return Tensor();
    auto n = std::make_shared<Node>();
    n->shape = node_->shape;
    n->data = node_->data;  // shared storage; the op graph is dropped
    n->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
    return Tensor(n);
}

Tensor Tensor::grad() const {
    if (!node_ || !node_->grad_slot) return Tensor();
    return Tensor(node_->grad_slot);
}

void Tensor::zero_grad() {
    if (node_) node_->grad_slot.reset();
}

NoRecordGuard::NoRecordGuard() : prev_(g_recording) { g_recording = false; }
NoRecordGuard::~NoRecordGuard() { g_recording = prev_; }

bool recording_enabled() { return g_recording; }

Tensor make_op(const Shape& shape, std::vector<float> data, const char* op_name,
               std::vector<Tensor> inputs,
               std::function<std::vector<Tensor>(const Tensor&)> backward_fn) {
    auto n = new_node(shape, std::move(data));
    bool any_rg = false;
    for (const auto& t : inputs) any_rg = any_rg || t.requires_grad();
    if (g_recording && any_rg) {
        n->requires_grad = true;
        n->op_name = op_name;
        n->parents.reserve(inputs.size());
        for (auto& t : inputs) n->parents.push_back(t.node());
        n->backward_fn = std::move(backward_fn);
    }
    return Tensor(n);
}

namespace tape {

namespace {

struct Walk {
    std::vector<Node*> order;                      // descending id
    std::unordered_map<Node*, Tensor> grads;
};

void collect(Node* root, std::vector<Node*>& out) {
    std::unordered_set<Node*> seen;
    std::vector<Node*> stack{root};
    seen.insert(root);
    while (!stack.empty()) {
        Node* n = stack.back();
        stack.pop_back();
        out.push_back(n);
        for (const auto& p : n->parents) {
            if (p->requires_grad && !seen.count(p.get())) {
                seen.insert(p.get());
                stack.push_back(p.get());
            }
        }
    }
    std::sort(out.begin(), out.end(), [](Node* a, Node* b) { return a->id > b->id; });
}

// Shared reverse pass. Seeds d(scalar)/d(scalar) = 1 and pushes gradients to
// parents in descending creation order, which is a topological order.
Walk run(const Tensor& scalar, bool create_graph) {
    if (scalar.numel() != 1) throw GraphError("backward: root must be a single-element tensor");
    if (!scalar.requires_grad())
        throw GraphError("backward: root does not require grad (nothing recorded)");

    Walk w;
    collect(scalar.node().get(), w.order);
    w.grads.emplace(scalar.node().get(), Tensor::full({1}, 1.0f));

    for (Node* n : w.order) {
        auto it = w.grads.find(n);
        if (it == w.grads.end()) continue;
        if (!n->backward_fn) continue;
        Tensor g = it->second;
        std::vector<Tensor> pg;
        if (create_graph) {
            pg = n->backward_fn(g);
        } else {
            NoRecordGuard guard;
            pg = n->backward_fn(g);
        }
        if (pg.size() != n->parents.size())
            throw GraphError("backward of " + n->op_name + " returned wrong gradient count");
        for (size_t i = 0; i < pg.size(); ++i) {
            if (!pg[i].defined()) continue;
            Node* p = n->parents[i].get();
            if (!p->requires_grad) continue;
            auto pit = w.grads.find(p);
            if (pit == w.grads.end()) {
                w.grads.emplace(p, pg[i]);
            } else {
                if (create_graph) {
                    pit->second = add(pit->second, pg[i]);
                } else {
                    NoRecordGuard guard;
                    pit->second = add(pit->second, pg[i]);
                }
            }
        }
    }
    return w;
}

}  // namespace

void backward(const Tensor& scalar) {
    Walk w = run(scalar, /*create_graph=*/false);
    NoRecordGuard guard;
    for (Node* n : w.order) {
        if (n->backward_fn || !n->requires_grad) continue;  // leaves only
        auto it = w.grads.find(n);
        if (it == w.grads.end()) continue;
        if (n->grad_slot) {
            Tensor acc = add(Tensor(n->grad_slot), it->second);
            n->grad_slot = acc.node();
        } else {
            n->grad_slot = it->second.detach().node();
        }
    }
}

Tensor grad_of_scalar_wrt(const Tensor& scalar, const Tensor& wrt, bool create_graph) {
    if (!wrt.defined() || !wrt.requires_grad())
        throw GraphError("grad_of_scalar_wrt: wrt tensor is not on the tape");
    if (scalar.numel() != 1) throw GraphError("grad_of_scalar_wrt: root must be a single-element tensor");
    if (!scalar.requires_grad()) {
        // Constant w.r.t. everything on the tape; the gradient is zero.
        return Tensor::zeros(wrt.shape());
    }
    Walk w = run(scalar, create_graph);
    auto it = w.grads.find(wrt.node().get());
    if (it == w.grads.end()) {
        // On the tape but no path from scalar: gradient is identically zero.
        return Tensor::zeros(wrt.shape());
    }
    return it->second;
}

}  // namespace tape

}  // namespace ukp::ag
