#pragma once

#include "gnp/nn/graph.hpp"

#include <random>
#include <string>
#include <vector>

namespace gnp::nn {

/// Affine map: x [m,in] @ W [in,out] + b. Parameter names "<prefix>.w"
/// and "<prefix>.b".
void init_linear(ParamStore& ps, const std::string& prefix, int in, int out, std::mt19937_64& rng);
Graph::NodeId linear(Graph& g, ParamStore& ps, Graph::NodeId x, const std::string& prefix);

/// MLP with relu between layers; dims = {in, h1, ..., out}.
void init_mlp(ParamStore& ps, const std::string& prefix, const std::vector<int>& dims,
              std::mt19937_64& rng);
Graph::NodeId mlp(Graph& g, ParamStore& ps, Graph::NodeId x, const std::string& prefix,
                  int layer_count);

struct LstmState {
    Graph::NodeId hidden;
    Graph::NodeId cell;
};

/// Standard gated cell; gate order i,f,g,o in the stacked weight matrices
/// "<prefix>.wx" [in,4h], "<prefix>.wh" [h,4h], "<prefix>.b" [4h].
void init_lstm(ParamStore& ps, const std::string& prefix, int in, int hidden, std::mt19937_64& rng);
LstmState lstm_step(Graph& g, ParamStore& ps, Graph::NodeId x, const LstmState& state,
                    const std::string& prefix);
LstmState lstm_zero_state(Graph& g, int hidden);

/// Multi-head scaled dot-product attention. Queries come from q_in [Lq,D],
/// keys/values from kv_in [Lk,D]; key_mask marks valid key slots. Parameter
/// names "<prefix>.{wq,wk,wv,wo}" (+ biases).
void init_attention(ParamStore& ps, const std::string& prefix, int d_model, std::mt19937_64& rng);
Graph::NodeId multi_head_attention(Graph& g, ParamStore& ps, Graph::NodeId q_in, Graph::NodeId kv_in,
                                   const std::vector<bool>& key_mask, int head_count,
                                   const std::string& prefix);

/// Two-layer position-wise feed-forward: relu(x W1 + b1) W2 + b2.
void init_ffn(ParamStore& ps, const std::string& prefix, int d_model, int d_ff,
              std::mt19937_64& rng);
Graph::NodeId ffn(Graph& g, ParamStore& ps, Graph::NodeId x, const std::string& prefix);

void init_layer_norm(ParamStore& ps, const std::string& prefix, int dim);
Graph::NodeId layer_norm(Graph& g, ParamStore& ps, Graph::NodeId x, const std::string& prefix);

}  // namespace gnp::nn
