#pragma once

#include "gnp/modes.hpp"
#include "gnp/nn/graph.hpp"
#include "gnp/trajdata.hpp"

#include <cstdint>
#include <vector>

namespace gnp::goalnet {

struct GoalNetConfig {
    int L = 20;
    int d_model = 64;
    int heads = 4;
    int blocks = 2;
    int d_ffn = 256;
    int t_obs = 15;
    int t_pred = 25;
    int n_max = 8;
    int goal_head_hidden = 64;
    double lambda_ce = 1.0;
    double huber_delta = 1.0;
    double rate = 1e-3;
    int epochs = 60;
    int batch = 16;
    std::uint64_t seed = 42;
    modes::CompareBasis basis = modes::CompareBasis::Endpoint;
};

/// K (test) or L (train) candidate goals with probabilities, normalized frame.
struct GoalHypothesisSet {
    std::vector<Vec2> goals;
    Eigen::VectorXd probabilities;      // renormalized over the returned subset
    Eigen::VectorXd raw_probabilities;  // original values from the full-L softmax
    std::vector<int> source_mode;
};

void init_params(nn::ParamStore& ps, const GoalNetConfig& cfg);

struct EncoderInput {
    nn::Graph::NodeId mode_embedding;         // [L, D]
    nn::Graph::NodeId observation_embedding;  // {D}
    nn::Graph::NodeId combined;               // [L, D]
};

/// Eq-style input embedding: modes flattened to L x 2*T_pred then linearly
/// embedded; observation flattened to 2*T_obs, embedded, broadcast-added.
EncoderInput embed_inputs(nn::Graph& g, nn::ParamStore& ps, const GoalNetConfig& cfg,
                          const modes::IntentionModeSet& modes,
                          const std::vector<traj::VehicleState>& observed);

/// Shape contract helper: stacks per-sample combined embeddings to {B, L, D}.
nn::Tensor embed_inputs_batch(nn::ParamStore& ps, const GoalNetConfig& cfg,
                              const modes::IntentionModeSet& modes,
                              const std::vector<std::vector<traj::VehicleState>>& observed_batch);

/// Mode-level encoder: self-attention + FFN blocks with residuals and layer
/// norm, no positional embedding.
nn::Graph::NodeId encode(nn::Graph& g, nn::ParamStore& ps, const GoalNetConfig& cfg,
                         nn::Graph::NodeId combined);

/// Social decoder: mode slots attend over embedded neighbor trajectories
/// (masked); no self-attention. With every neighbor masked the attention
/// sublayer is bypassed and only the FFN-residual path applies.
nn::Graph::NodeId decode_social(nn::Graph& g, nn::ParamStore& ps, const GoalNetConfig& cfg,
                                nn::Graph::NodeId memory, const traj::TrajectoryWindow& window);

struct Heads {
    nn::Graph::NodeId goals;   // [L, 2]
    nn::Graph::NodeId logits;  // {L}
    nn::Graph::NodeId probs;   // {L}
};

/// Probability head reads the encoder output; goal head reads the decoder
/// output and adds per-mode offsets to the mode-center endpoints.
Heads predict_heads(nn::Graph& g, nn::ParamStore& ps, const GoalNetConfig& cfg,
                    nn::Graph::NodeId encoder_out, nn::Graph::NodeId decoder_out,
                    const modes::IntentionModeSet& modes);

struct ForwardResult {
    EncoderInput embedding;
    nn::Graph::NodeId encoder_out;
    nn::Graph::NodeId decoder_out;
    Heads heads;
};

ForwardResult forward(nn::Graph& g, nn::ParamStore& ps, const GoalNetConfig& cfg,
                      const modes::IntentionModeSet& modes, const traj::TrajectoryWindow& window);

/// Greedy target index (nearest mode to the ground-truth goal) and the
/// soft probability vector used by the cross-entropy term.
std::pair<int, Eigen::VectorXd> training_targets(const traj::TrajectoryWindow& normalized_window,
                                                 const modes::IntentionModeSet& modes,
                                                 modes::CompareBasis basis);

/// Scalar loss node: huber(goal at target index, gt goal) + lambda * soft CE.
nn::Graph::NodeId sample_loss(nn::Graph& g, nn::ParamStore& ps, const GoalNetConfig& cfg,
                              const modes::IntentionModeSet& modes,
                              const traj::TrajectoryWindow& window);

struct TrainResult {
    std::vector<double> epoch_losses;
    bool aborted = false;
};

TrainResult train(nn::ParamStore& ps, const GoalNetConfig& cfg,
                  const std::vector<traj::TrajectoryWindow>& normalized_windows,
                  const modes::IntentionModeSet& modes);

/// Top-K goals by predicted probability, sorted descending (ties break low).
GoalHypothesisSet sample_goals(const traj::TrajectoryWindow& normalized_window,
                               const modes::IntentionModeSet& modes, nn::ParamStore& ps,
                               const GoalNetConfig& cfg, int k);

}  // namespace gnp::goalnet
