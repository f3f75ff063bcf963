#pragma once

#include "gnp/goalnet.hpp"
#include "gnp/modes.hpp"
#include "gnp/nsf.hpp"
#include "gnp/trajdata.hpp"

#include <string>
#include <vector>

namespace gnp::eval {

double ade(const std::vector<Vec2>& truth, const std::vector<Vec2>& pred);
double fde(const std::vector<Vec2>& truth, const std::vector<Vec2>& pred);
double rmse(const std::vector<Vec2>& truth, const std::vector<Vec2>& pred);

struct MetricReport {
    double ade = 0.0;
    double fde = 0.0;
    double rmse = 0.0;
    double ade_weighted = 0.0;   // probability-weighted secondary column
    double fde_weighted = 0.0;
    double rmse_weighted = 0.0;
    std::vector<double> horizon_rmse;  // per-second slices over the horizon
    int k = 1;
    std::size_t sample_count = 0;
};

/// Constant-velocity extrapolation from the last two observed positions.
std::vector<Vec2> baseline_cv(const traj::TrajectoryWindow& window);
/// Constant-acceleration extrapolation fitted on the last three positions.
std::vector<Vec2> baseline_ca(const traj::TrajectoryWindow& window);

MetricReport evaluate_baseline(const std::vector<traj::TrajectoryWindow>& windows, bool accel);

/// Everything needed to produce multi-modal predictions for one window.
struct Predictor {
    const modes::IntentionModeSet* modes = nullptr;
    nn::ParamStore* goal_params = nullptr;
    goalnet::GoalNetConfig goal_cfg;
    nn::ParamStore* nsf_params = nullptr;
    nsf::NsfConfig nsf_cfg;
    bool repulsion_on = true;
};

struct Prediction {
    std::vector<std::vector<Vec2>> trajectories;  // K hypotheses, original frame
    Eigen::VectorXd probabilities;                // renormalized over K
    std::vector<nsf::RolloutResult> rollouts;     // normalized-frame detail
    int best_index = 0;                           // min-ADE vs truth when known
};

/// Normalize, sample top-K goals, roll out each, map back to the original
/// frame.
Prediction predict(const Predictor& model, const traj::TrajectoryWindow& window,
                   const traj::LaneGeometry& lanes, int k);

/// Best-of-K protocol: per window the minimum-ADE hypothesis is scored;
/// probability-weighted metrics are reported alongside.
MetricReport evaluate_best_of_k(const Predictor& model,
                                const std::vector<traj::TrajectoryWindow>& windows,
                                const traj::LaneGeometry& lanes, int k);

struct AblationVariant {
    std::string name;
    bool intention_modes = true;
    bool f_goal = true;
    bool f_rep = true;
};

struct AblationResult {
    AblationVariant variant;
    MetricReport report;
};

struct AblationConfig {
    goalnet::GoalNetConfig goal_cfg;
    nsf::NsfConfig nsf_cfg;
    int k = 6;
};

/// The four-variant grid: (1) no IM + full forces, (2) no IM + goal force
/// only, (3) IM + goal force only, (4) the full model. "No IM" replaces the
/// mode set with the single all-data mean future (L=1, K=1).
std::vector<AblationResult> run_ablation(const std::vector<traj::TrajectoryWindow>& train_windows,
                                         const std::vector<traj::TrajectoryWindow>& eval_windows,
                                         const traj::LaneGeometry& lanes, const AblationConfig& cfg);

std::string format_report_table(const std::vector<std::pair<std::string, MetricReport>>& rows);
void write_report_csv(const std::vector<std::pair<std::string, MetricReport>>& rows,
                      const std::string& path);

}  // namespace gnp::eval
