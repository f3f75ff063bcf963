#pragma once

#include "gnp/nn/param_store.hpp"
#include "gnp/nn/tensor.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gnp::nn {

/// Reverse-mode tape over a fixed vocabulary of dense operations.
/// Nodes are appended in topological order; backward() walks the tape in
/// reverse and accumulates parameter gradients into the bound ParamStore.
class Graph {
public:
    using NodeId = int;

    NodeId leaf(Tensor value, bool requires_grad = false);
    NodeId constant(Tensor value) { return leaf(std::move(value), false); }
    NodeId param(ParamStore& store, const std::string& name);

    const Tensor& value(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    const Tensor& grad(NodeId id) const;
    std::size_t node_count() const { return nodes_.size(); }

    /// Seeds d(root)=1 (root must be a single element) and accumulates
    /// gradients into leaves and bound parameters.
    void backward(NodeId root);

    // --- arithmetic ---
    NodeId matmul(NodeId a, NodeId b);
    NodeId add(NodeId a, NodeId b);        // same shape, or [m,n] + row [n]
    NodeId sub(NodeId a, NodeId b);        // same shape
    NodeId mul(NodeId a, NodeId b);        // elementwise, same shape
    NodeId addn(const std::vector<NodeId>& xs);
    NodeId scale(NodeId a, double c);
    NodeId smul(NodeId a, NodeId s);       // a * scalar-node s
    NodeId sdiv(NodeId a, NodeId s);       // a / scalar-node s
    NodeId adds(NodeId a, NodeId s);       // a + scalar-node s (broadcast)

    // --- activations / pointwise ---
    NodeId relu(NodeId a);
    NodeId tanh_op(NodeId a);
    NodeId sigmoid(NodeId a);
    NodeId softplus(NodeId a);
    NodeId exp_op(NodeId a);

    // --- structure ---
    NodeId transpose(NodeId a);
    NodeId concat_cols(NodeId a, NodeId b);
    NodeId concat_vec(const std::vector<NodeId>& xs);        // 1-D concat
    NodeId slice_cols(NodeId a, int c0, int len);
    NodeId row(NodeId a, int r);                             // [m,n] -> {n}
    NodeId stack_rows(const std::vector<NodeId>& xs);        // k x {n} -> [k,n]
    NodeId elem(NodeId a, int i);                            // {n} -> {1}

    // --- reductions / norms ---
    NodeId sum(NodeId a);        // -> {1}
    NodeId mean(NodeId a);       // -> {1}
    NodeId mean_cols(NodeId a);  // [m,n] -> {m}
    NodeId vnorm(NodeId a);      // {n} -> {1}, euclidean

    // --- normalization / attention pieces ---
    NodeId row_softmax(NodeId a);
    /// softmax along columns with masked key slots excluded; throws
    /// NumericsError when a row has every key masked.
    NodeId masked_row_softmax(NodeId a, const std::vector<bool>& key_mask);
    NodeId layer_norm(NodeId x, NodeId gain, NodeId bias, double eps = 1e-5);

    /// Sign-preserving clamp of |x| to at least `floor`; gradient is zero
    /// in the clamped region. Reports whether it clamped via out param.
    NodeId clamp_abs_min(NodeId a, double floor, bool* clamped = nullptr);

    // --- losses ---
    NodeId huber(NodeId pred, const Tensor& target, double delta);         // -> {1}
    NodeId cross_entropy_soft(NodeId logits, const Tensor& soft_target);   // -> {1}
    NodeId mse(NodeId pred, const Tensor& target);                         // -> {1}

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void(Graph&, NodeId)> backward;
        bool requires_grad = false;
        ParamStore* store = nullptr;
        std::string param_name;
    };

    NodeId push(Tensor value, bool requires_grad, std::function<void(Graph&, NodeId)> backward,
                const char* context);
    Tensor& grad_mut(NodeId id) { return nodes_[static_cast<std::size_t>(id)].grad; }
    bool needs(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }

    std::vector<Node> nodes_;
};

}  // namespace gnp::nn
