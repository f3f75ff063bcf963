#include "gnp/nn/layers.hpp"

#include <cmath>

namespace gnp::nn {

void init_linear(ParamStore& ps, const std::string& prefix, int in, int out, std::mt19937_64& rng) {
    ps.init_fan_in(prefix + ".w", {in, out}, in, rng);
    ps.create(prefix + ".b", {out});
}

Graph::NodeId linear(Graph& g, ParamStore& ps, Graph::NodeId x, const std::string& prefix) {
    const Tensor& X = g.value(x);
    const Tensor& W = ps.value(prefix + ".w");
    if (X.cols() != W.rows())
        throw ShapeError("linear '" + prefix + "': input " + X.shape_str() + " does not match weights " +
                         W.shape_str());
    auto w = g.param(ps, prefix + ".w");
    auto b = g.param(ps, prefix + ".b");
    return g.add(g.matmul(x, w), b);
}

void init_mlp(ParamStore& ps, const std::string& prefix, const std::vector<int>& dims,
              std::mt19937_64& rng) {
    for (std::size_t i = 0; i + 1 < dims.size(); ++i)
        init_linear(ps, prefix + ".l" + std::to_string(i), dims[i], dims[i + 1], rng);
}

Graph::NodeId mlp(Graph& g, ParamStore& ps, Graph::NodeId x, const std::string& prefix,
                  int layer_count) {
    Graph::NodeId h = x;
    for (int i = 0; i < layer_count; ++i) {
        h = linear(g, ps, h, prefix + ".l" + std::to_string(i));
        if (i + 1 < layer_count) h = g.relu(h);
    }
    return h;
}

void init_lstm(ParamStore& ps, const std::string& prefix, int in, int hidden, std::mt19937_64& rng) {
    ps.init_fan_in(prefix + ".wx", {in, 4 * hidden}, in, rng);
    ps.init_fan_in(prefix + ".wh", {hidden, 4 * hidden}, hidden, rng);
    ps.create(prefix + ".b", {4 * hidden});
}

LstmState lstm_zero_state(Graph& g, int hidden) {
    return {g.constant(Tensor::zeros({hidden})), g.constant(Tensor::zeros({hidden}))};
}

LstmState lstm_step(Graph& g, ParamStore& ps, Graph::NodeId x, const LstmState& state,
                    const std::string& prefix) {
    auto wx = g.param(ps, prefix + ".wx");
    auto wh = g.param(ps, prefix + ".wh");
    auto b = g.param(ps, prefix + ".b");
    const int hidden = g.value(state.hidden).size();

    auto gates = g.add(g.add(g.matmul(x, wx), g.matmul(state.hidden, wh)), b);
    auto i_gate = g.sigmoid(g.slice_cols(gates, 0, hidden));
    auto f_gate = g.sigmoid(g.slice_cols(gates, hidden, hidden));
    auto g_gate = g.tanh_op(g.slice_cols(gates, 2 * hidden, hidden));
    auto o_gate = g.sigmoid(g.slice_cols(gates, 3 * hidden, hidden));

    auto cell = g.add(g.mul(f_gate, state.cell), g.mul(i_gate, g_gate));
    auto hidden_out = g.mul(o_gate, g.tanh_op(cell));
    return {hidden_out, cell};
}

void init_attention(ParamStore& ps, const std::string& prefix, int d_model, std::mt19937_64& rng) {
    init_linear(ps, prefix + ".wq", d_model, d_model, rng);
    init_linear(ps, prefix + ".wk", d_model, d_model, rng);
    init_linear(ps, prefix + ".wv", d_model, d_model, rng);
    init_linear(ps, prefix + ".wo", d_model, d_model, rng);
}

Graph::NodeId multi_head_attention(Graph& g, ParamStore& ps, Graph::NodeId q_in, Graph::NodeId kv_in,
                                   const std::vector<bool>& key_mask, int head_count,
                                   const std::string& prefix) {
    const int d_model = g.value(q_in).cols();
    if (d_model % head_count != 0)
        throw ShapeError("attention: model dimension " + std::to_string(d_model) +
                         " not divisible by head count " + std::to_string(head_count));
    const int d_head = d_model / head_count;

    auto q = linear(g, ps, q_in, prefix + ".wq");
    auto k = linear(g, ps, kv_in, prefix + ".wk");
    auto v = linear(g, ps, kv_in, prefix + ".wv");

    std::vector<Graph::NodeId> heads;
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(d_head));
    for (int h = 0; h < head_count; ++h) {
        auto qh = g.slice_cols(q, h * d_head, d_head);
        auto kh = g.slice_cols(k, h * d_head, d_head);
        auto vh = g.slice_cols(v, h * d_head, d_head);
        auto scores = g.scale(g.matmul(qh, g.transpose(kh)), inv_sqrt);
        auto attn = g.masked_row_softmax(scores, key_mask);
        heads.push_back(g.matmul(attn, vh));
    }
    Graph::NodeId cat = heads[0];
    for (std::size_t h = 1; h < heads.size(); ++h) cat = g.concat_cols(cat, heads[h]);
    return linear(g, ps, cat, prefix + ".wo");
}

void init_ffn(ParamStore& ps, const std::string& prefix, int d_model, int d_ff,
              std::mt19937_64& rng) {
    init_linear(ps, prefix + ".l0", d_model, d_ff, rng);
    init_linear(ps, prefix + ".l1", d_ff, d_model, rng);
}

Graph::NodeId ffn(Graph& g, ParamStore& ps, Graph::NodeId x, const std::string& prefix) {
    return linear(g, ps, g.relu(linear(g, ps, x, prefix + ".l0")), prefix + ".l1");
}

void init_layer_norm(ParamStore& ps, const std::string& prefix, int dim) {
    Tensor& gain = ps.create(prefix + ".g", {dim});
    gain.data.setOnes();
    ps.create(prefix + ".b", {dim});
}

Graph::NodeId layer_norm(Graph& g, ParamStore& ps, Graph::NodeId x, const std::string& prefix) {
    return g.layer_norm(x, g.param(ps, prefix + ".g"), g.param(ps, prefix + ".b"));
}

}  // namespace gnp::nn
