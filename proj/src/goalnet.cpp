#include "gnp/goalnet.hpp"

#include "gnp/nn/layers.hpp"
#include "gnp/nn/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace gnp::goalnet {

using nn::Graph;
using nn::ParamStore;
using nn::Tensor;

namespace {

// positions are fed to the embeddings in decameters to keep pre-norm
// activations near unit scale
constexpr double kPosScale = 0.1;

Tensor flatten_states(const std::vector<traj::VehicleState>& states) {
    Tensor t = Tensor::zeros({2 * static_cast<int>(states.size())});
    for (std::size_t i = 0; i < states.size(); ++i) {
        t.data(2 * static_cast<long>(i)) = states[i].position.x() * kPosScale;
        t.data(2 * static_cast<long>(i) + 1) = states[i].position.y() * kPosScale;
    }
    return t;
}

Tensor flatten_modes(const modes::IntentionModeSet& m) {
    Tensor t = Tensor::zeros({m.L(), 2 * m.t_pred});
    for (int l = 0; l < m.L(); ++l) {
        const auto& c = m.centers[static_cast<std::size_t>(l)];
        for (int i = 0; i < m.t_pred; ++i) {
            t.at(l, 2 * i) = c(i, 0) * kPosScale;
            t.at(l, 2 * i + 1) = c(i, 1) * kPosScale;
        }
    }
    return t;
}

Tensor mode_endpoints(const modes::IntentionModeSet& m) {
    Tensor t = Tensor::zeros({m.L(), 2});
    for (int l = 0; l < m.L(); ++l) {
        t.at(l, 0) = m.endpoint(l).x();
        t.at(l, 1) = m.endpoint(l).y();
    }
    return t;
}

Graph::NodeId encoder_block(Graph& g, ParamStore& ps, const GoalNetConfig& cfg, Graph::NodeId x,
                            const std::string& prefix) {
    std::vector<bool> all_valid(static_cast<std::size_t>(cfg.L), true);
    auto attn = nn::multi_head_attention(g, ps, x, x, all_valid, cfg.heads, prefix + ".attn");
    auto x1 = nn::layer_norm(g, ps, g.add(x, attn), prefix + ".ln1");
    auto f = nn::ffn(g, ps, x1, prefix + ".ffn");
    return nn::layer_norm(g, ps, g.add(x1, f), prefix + ".ln2");
}

}  // namespace

void init_params(ParamStore& ps, const GoalNetConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    nn::init_linear(ps, "embed.modes", 2 * cfg.t_pred, cfg.d_model, rng);
    nn::init_linear(ps, "embed.obs", 2 * cfg.t_obs, cfg.d_model, rng);
    for (int b = 0; b < cfg.blocks; ++b) {
        const std::string prefix = "enc" + std::to_string(b);
        nn::init_attention(ps, prefix + ".attn", cfg.d_model, rng);
        nn::init_layer_norm(ps, prefix + ".ln1", cfg.d_model);
        nn::init_ffn(ps, prefix + ".ffn", cfg.d_model, cfg.d_ffn, rng);
        nn::init_layer_norm(ps, prefix + ".ln2", cfg.d_model);
    }
    nn::init_linear(ps, "dec.embed", 2 * cfg.t_obs, cfg.d_model, rng);
    nn::init_attention(ps, "dec.attn", cfg.d_model, rng);
    nn::init_layer_norm(ps, "dec.ln1", cfg.d_model);
    nn::init_ffn(ps, "dec.ffn", cfg.d_model, cfg.d_ffn, rng);
    nn::init_layer_norm(ps, "dec.ln2", cfg.d_model);

    nn::init_mlp(ps, "head.goal", {cfg.d_model, cfg.goal_head_hidden, 2}, rng);
    // zero offsets at start so predicted goals begin at the mode anchors
    ps.value("head.goal.l1.w").data.setZero();
    ps.value("head.goal.l1.b").data.setZero();
    ps.create("head.prob.w", {1});
    ps.create("head.prob.b", {1});
}

EncoderInput embed_inputs(Graph& g, ParamStore& ps, const GoalNetConfig& cfg,
                          const modes::IntentionModeSet& modes,
                          const std::vector<traj::VehicleState>& observed) {
    if (modes.L() != cfg.L) throw ShapeError("mode count does not match configured L");
    if (modes.t_pred != cfg.t_pred) throw ShapeError("mode t_pred does not match configured t_pred");
    if (static_cast<int>(observed.size()) != cfg.t_obs)
        throw ShapeError("observed length does not match configured t_obs");

    EncoderInput e;
    e.mode_embedding = nn::linear(g, ps, g.constant(flatten_modes(modes)), "embed.modes");
    e.observation_embedding = nn::linear(g, ps, g.constant(flatten_states(observed)), "embed.obs");
    e.combined = g.add(e.mode_embedding, e.observation_embedding);
    return e;
}

Tensor embed_inputs_batch(ParamStore& ps, const GoalNetConfig& cfg,
                          const modes::IntentionModeSet& modes,
                          const std::vector<std::vector<traj::VehicleState>>& observed_batch) {
    const int b = static_cast<int>(observed_batch.size());
    Tensor out = Tensor::zeros({b, cfg.L, cfg.d_model});
    for (int i = 0; i < b; ++i) {
        Graph g;
        auto e = embed_inputs(g, ps, cfg, modes, observed_batch[static_cast<std::size_t>(i)]);
        out.data.segment(static_cast<long>(i) * cfg.L * cfg.d_model,
                         static_cast<long>(cfg.L) * cfg.d_model) = g.value(e.combined).data;
    }
    return out;
}

Graph::NodeId encode(Graph& g, ParamStore& ps, const GoalNetConfig& cfg, Graph::NodeId combined) {
    Graph::NodeId x = combined;
    for (int b = 0; b < cfg.blocks; ++b) x = encoder_block(g, ps, cfg, x, "enc" + std::to_string(b));
    return x;
}

Graph::NodeId decode_social(Graph& g, ParamStore& ps, const GoalNetConfig& cfg,
                            Graph::NodeId memory, const traj::TrajectoryWindow& window) {
    if (static_cast<int>(window.neighbors.size()) != cfg.n_max)
        throw ShapeError("neighbor slot count does not match configured n_max");

    std::vector<bool> mask;
    bool any = false;
    Tensor flat = Tensor::zeros({cfg.n_max, 2 * cfg.t_obs});
    for (int n = 0; n < cfg.n_max; ++n) {
        const auto& nb = window.neighbors[static_cast<std::size_t>(n)];
        mask.push_back(nb.present);
        any = any || nb.present;
        if (nb.present) {
            if (static_cast<int>(nb.observed.size()) != cfg.t_obs)
                throw ShapeError("neighbor track length does not match t_obs");
            flat.mat().row(n) = flatten_states(nb.observed).mat().row(0);
        }
    }

    Graph::NodeId x = memory;
    if (any) {
        auto neighbor_emb = nn::linear(g, ps, g.constant(flat), "dec.embed");
        auto attn = nn::multi_head_attention(g, ps, memory, neighbor_emb, mask, cfg.heads, "dec.attn");
        x = nn::layer_norm(g, ps, g.add(memory, attn), "dec.ln1");
    }
    auto f = nn::ffn(g, ps, x, "dec.ffn");
    return nn::layer_norm(g, ps, g.add(x, f), "dec.ln2");
}

Heads predict_heads(Graph& g, ParamStore& ps, const GoalNetConfig& cfg, Graph::NodeId encoder_out,
                    Graph::NodeId decoder_out, const modes::IntentionModeSet& modes) {
    Heads h;
    auto offsets = nn::mlp(g, ps, decoder_out, "head.goal", 2);
    h.goals = g.add(offsets, g.constant(mode_endpoints(modes)));

    auto pooled = g.mean_cols(encoder_out);  // {L}
    h.logits = g.adds(g.smul(pooled, g.param(ps, "head.prob.w")), g.param(ps, "head.prob.b"));
    h.probs = g.row_softmax(h.logits);
    (void)cfg;
    return h;
}

ForwardResult forward(Graph& g, ParamStore& ps, const GoalNetConfig& cfg,
                      const modes::IntentionModeSet& modes, const traj::TrajectoryWindow& window) {
    ForwardResult r;
    r.embedding = embed_inputs(g, ps, cfg, modes, window.observed);
    r.encoder_out = encode(g, ps, cfg, r.embedding.combined);
    r.decoder_out = decode_social(g, ps, cfg, r.encoder_out, window);
    r.heads = predict_heads(g, ps, cfg, r.encoder_out, r.decoder_out, modes);
    return r;
}

std::pair<int, Eigen::VectorXd> training_targets(const traj::TrajectoryWindow& normalized_window,
                                                 const modes::IntentionModeSet& modes,
                                                 modes::CompareBasis basis) {
    modes::Trajectory future(normalized_window.t_pred(), 2);
    for (int i = 0; i < normalized_window.t_pred(); ++i)
        future.row(i) = normalized_window.future[static_cast<std::size_t>(i)].position.transpose();
    const int target = modes::nearest_mode_basis(future, modes, basis);
    return {target, modes::soft_probabilities_basis(future, modes, basis)};
}

Graph::NodeId sample_loss(Graph& g, ParamStore& ps, const GoalNetConfig& cfg,
                          const modes::IntentionModeSet& modes,
                          const traj::TrajectoryWindow& window) {
    auto fwd = forward(g, ps, cfg, modes, window);
    auto [target_idx, soft] = training_targets(window, modes, cfg.basis);

    const Vec2 gt_goal = window.future.back().position;
    auto picked = g.row(fwd.heads.goals, target_idx);
    auto regression = g.huber(picked, Tensor::vec2(gt_goal), cfg.huber_delta);
    auto ce = g.cross_entropy_soft(fwd.heads.logits, Tensor::vec(soft));
    return g.add(regression, g.scale(ce, cfg.lambda_ce));
}

TrainResult train(ParamStore& ps, const GoalNetConfig& cfg,
                  const std::vector<traj::TrajectoryWindow>& windows,
                  const modes::IntentionModeSet& modes) {
    if (windows.empty()) throw DataError("train: no windows");
    TrainResult result;
    std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, 0x7aa1));
    nn::AdamConfig adam;
    adam.rate = cfg.rate;

    ParamStore snapshot = ps;
    std::vector<std::size_t> order(windows.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_loss = 0.0;
        std::size_t cursor = 0;
        while (cursor < order.size()) {
            const std::size_t batch_end = std::min(order.size(), cursor + static_cast<std::size_t>(cfg.batch));
            const double inv_batch = 1.0 / static_cast<double>(batch_end - cursor);
            ps.zero_grads();
            for (std::size_t i = cursor; i < batch_end; ++i) {
                Graph g;
                auto loss = sample_loss(g, ps, cfg, modes, windows[order[i]]);
                epoch_loss += g.value(loss).data(0);
                g.backward(g.scale(loss, inv_batch));
            }
            adam_step(ps, adam);
            cursor = batch_end;
        }
        epoch_loss /= static_cast<double>(windows.size());
        if (!std::isfinite(epoch_loss)) {
            ps = snapshot;
            result.aborted = true;
            break;
        }
        result.epoch_losses.push_back(epoch_loss);
        snapshot = ps;
    }
    return result;
}

GoalHypothesisSet sample_goals(const traj::TrajectoryWindow& window,
                               const modes::IntentionModeSet& modes, ParamStore& ps,
                               const GoalNetConfig& cfg, int k) {
    if (k < 1 || k > cfg.L) throw ConfigError("K must satisfy 1 <= K <= L");
    Graph g;
    auto fwd = forward(g, ps, cfg, modes, window);
    const Tensor& goals = g.value(fwd.heads.goals);
    const Tensor& probs = g.value(fwd.heads.probs);

    std::vector<int> order(static_cast<std::size_t>(cfg.L));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return probs.data(a) > probs.data(b); });

    GoalHypothesisSet out;
    out.probabilities = Eigen::VectorXd(k);
    out.raw_probabilities = Eigen::VectorXd(k);
    double subset_sum = 0.0;
    for (int i = 0; i < k; ++i) subset_sum += probs.data(order[static_cast<std::size_t>(i)]);
    for (int i = 0; i < k; ++i) {
        const int l = order[static_cast<std::size_t>(i)];
        out.goals.emplace_back(goals.at(l, 0), goals.at(l, 1));
        out.raw_probabilities(i) = probs.data(l);
        out.probabilities(i) = probs.data(l) / subset_sum;
        out.source_mode.push_back(l);
    }
    return out;
}

}  // namespace gnp::goalnet
