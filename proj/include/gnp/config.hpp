#pragma once

#include "gnp/common.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gnp::cli {

/// Flat key=value configuration with '#' comments. Unknown keys are
/// rejected; validation reports every violation at once.
struct RunConfig {
    // paths
    std::string dataset;
    std::string lanes;
    std::string labels;
    std::string modes_csv;
    std::string modes_meta;
    std::string goal_checkpoint;
    std::string nsf_checkpoint;
    std::string out_dir = "out";
    std::string schema = "canonical";

    // windowing
    int t_obs = 15;
    int t_pred = 25;
    int stride = 40;
    double dt = 0.2;

    // neighbor rule
    double neighbor_radius = 50.0;
    double neighbor_lateral = 5.55;
    int neighbor_max = 8;

    // generator
    int gen_lane_count = 3;
    double gen_lane_width = 3.7;
    double gen_duration = 12.0;
    int gen_vehicle_count = 200;
    double gen_mix_straight = 0.5;
    double gen_mix_left = 0.25;
    double gen_mix_right = 0.25;
    double gen_speed_min = 24.0;
    double gen_speed_max = 26.0;

    // intention modes
    int modes_count = 20;
    std::string modes_basis = "endpoint";

    // goal network
    int goal_d_model = 64;
    int goal_heads = 4;
    int goal_blocks = 2;
    int goal_ffn = 256;
    int goal_head_hidden = 64;
    double goal_lambda = 1.0;
    double goal_rate = 1e-3;
    int goal_epochs = 60;
    int goal_batch = 16;

    // force model
    double nsf_r_col = 5.0;
    double nsf_a = 5.0;
    double nsf_eps_line = 0.1;
    double nsf_tau_min = 0.05;
    int nsf_history = 6;
    int nsf_embed = 32;
    int nsf_lstm_hidden = 32;
    int nsf_mlp_hidden = 32;
    double nsf_rate = 5e-3;
    int nsf_epochs_phase1 = 30;
    int nsf_epochs_phase2 = 20;
    int nsf_batch = 16;
    bool nsf_joint_phase2 = false;
    bool nsf_oracle_goals = true;

    // evaluation
    int eval_k = 6;
    double eval_split = 0.8;

    // plotting
    std::string plot_kind = "modes";
    int plot_window = 0;
    int plot_step = 0;

    std::uint64_t seed = 42;

    static RunConfig from_file(const std::string& path);
    static RunConfig from_map(const std::map<std::string, std::string>& kv);

    /// Canonical key=value dump (sorted keys); hashing this gives the
    /// manifest config hash.
    std::string canonical_dump() const;
    std::uint64_t hash() const { return fnv1a64(canonical_dump()); }

    /// Throws ConfigError listing every violated range at once.
    void validate() const;
};

std::map<std::string, std::string> parse_key_value_file(const std::string& path);

}  // namespace gnp::cli
