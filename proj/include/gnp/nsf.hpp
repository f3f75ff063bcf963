#pragma once

#include "gnp/forces.hpp"
#include "gnp/nn/graph.hpp"
#include "gnp/trajdata.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace gnp::nsf {

struct NsfConfig {
    double r_col = 5.0;    // potential scale, meters
    double a = 5.0;        // upper bound for sigmoid-scaled k values
    double eps_line = kEpsLine;
    double eps_pos = kEpsPos;
    double tau_min = 0.05;  // seconds
    int history = 6;        // current state plus the last 5 through the LSTM
    int embed_dim = 32;
    int lstm_hidden = 32;
    int mlp_hidden = 32;
    double rate = 5e-3;
    int epochs_phase1 = 30;
    int epochs_phase2 = 20;
    int batch = 16;
    bool joint_phase2 = false;  // default freezes tau while k trains
    double fixed_tau = 0.0;     // > 0 bypasses the tau network (diagnostics)
    std::uint64_t seed = 42;
};

/// Per-step interpretability record. The recorded acceleration equals
/// f_goal plus every per-source repulsion term exactly.
struct ForceBreakdown {
    Vec2 f_goal{0.0, 0.0};
    std::vector<std::pair<long, Vec2>> f_rep_vehicles;
    std::vector<std::pair<int, Vec2>> f_rep_lines;
    double tau = 0.0;
    std::vector<double> k_vehicles;
    std::vector<double> k_lines;
    double v0 = 0.0;
    Vec2 direction{0.0, 0.0};  // e, zero when degenerate
    Vec2 acceleration{0.0, 0.0};
    int clamp_events = 0;
    int coincident_events = 0;
};

struct RolloutResult {
    std::vector<Vec2> positions;   // length t_pred
    std::vector<Vec2> velocities;
    std::vector<ForceBreakdown> steps;
};

/// One training/evaluation sample in the normalized frame: the window plus
/// the lane geometry transformed into the same frame.
struct Sample {
    traj::TrajectoryWindow window;
    traj::LaneGeometry lanes;
};

void init_params(nn::ParamStore& ps, const NsfConfig& cfg);

/// tau = tau_min + softplus(raw): the current-state encoding runs through an
/// LSTM over the recent window, is projected, concatenated with the embedded
/// goal offset, and mapped by an MLP.
nn::Graph::NodeId tau_network(nn::Graph& g, nn::ParamStore& ps, const NsfConfig& cfg,
                              const std::vector<nn::Graph::NodeId>& recent_features,
                              nn::Graph::NodeId goal_offset);

struct KValues {
    std::vector<nn::Graph::NodeId> vehicles;  // one scalar node per neighbor
    std::vector<nn::Graph::NodeId> lines;     // one per lane line
};

/// k = a * sigmoid(raw) from pairwise concatenated encodings: the target
/// encoding with each neighbor encoding, and with each line feature.
KValues k_network(nn::Graph& g, nn::ParamStore& ps, const NsfConfig& cfg,
                  nn::Graph::NodeId target_velocity,
                  const std::vector<nn::Graph::NodeId>& neighbor_features,
                  const std::vector<nn::Graph::NodeId>& line_features);

struct RolloutTape {
    std::vector<nn::Graph::NodeId> positions;
    std::vector<nn::Graph::NodeId> velocities;
    struct StepRecord {
        nn::Graph::NodeId f_goal, acceleration, tau;
        std::vector<std::pair<long, nn::Graph::NodeId>> f_vehicles;
        std::vector<std::pair<int, nn::Graph::NodeId>> f_lines;
        std::vector<nn::Graph::NodeId> k_vehicles, k_lines;
        double v0 = 0.0;
        Vec2 direction{0.0, 0.0};
        int clamp_events = 0;
        int coincident_events = 0;
    };
    std::vector<StepRecord> steps;
};

/// Unrolled first-order (Euler) integration of the force model on the tape;
/// gradients flow through every step. Neighbors advance by constant-velocity
/// extrapolation from their last observed states.
RolloutTape rollout_tape(nn::Graph& g, nn::ParamStore& ps, const NsfConfig& cfg,
                         const Sample& sample, const Vec2& goal, bool repulsion_on);

/// Convenience wrapper evaluating the tape and extracting values.
RolloutResult rollout(const Sample& sample, const Vec2& goal, nn::ParamStore& ps,
                      const NsfConfig& cfg, bool repulsion_on);

/// Mean squared position error of a rollout against the window's future.
nn::Graph::NodeId rollout_mse(nn::Graph& g, const RolloutTape& tape,
                              const traj::TrajectoryWindow& window);

struct TrainResult {
    std::vector<double> phase1_losses;
    std::vector<double> phase2_losses;
    bool aborted = false;
};

/// Progressive training: phase 1 fits the tau network with repulsion
/// disabled; phase 2 fits the k networks with the full force model (tau
/// frozen unless joint_phase2). Goals default to the ground-truth endpoints;
/// goal_override supplies one goal per sample instead.
TrainResult train(nn::ParamStore& ps, const NsfConfig& cfg, const std::vector<Sample>& samples,
                  const std::vector<Vec2>* goal_override = nullptr);

/// ForceBreakdown CSV (one row per step) plus a JSON-lines per-source dump.
void write_breakdown_csv(const RolloutResult& result, double dt, const std::string& csv_path,
                         const std::string& jsonl_path);

}  // namespace gnp::nsf
