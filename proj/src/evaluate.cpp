#include "gnp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gnp::eval {

Prediction predict(const Predictor& model, const traj::TrajectoryWindow& window,
                   const traj::LaneGeometry& lanes, int k) {
    auto [norm, tf] = traj::normalize(window);
    nsf::Sample sample;
    sample.window = norm;
    sample.lanes = lanes.transformed(tf);

    const int k_eff = std::min(k, model.goal_cfg.L);
    auto goals = goalnet::sample_goals(norm, *model.modes, *model.goal_params, model.goal_cfg, k_eff);

    Prediction pred;
    pred.probabilities = goals.probabilities;
    for (int i = 0; i < k_eff; ++i) {
        auto result = nsf::rollout(sample, goals.goals[static_cast<std::size_t>(i)],
                                   *model.nsf_params, model.nsf_cfg, model.repulsion_on);
        std::vector<Vec2> original_frame;
        for (const auto& p : result.positions) original_frame.push_back(tf.invert_point(p));
        pred.trajectories.push_back(std::move(original_frame));
        pred.rollouts.push_back(std::move(result));
    }

    std::vector<Vec2> truth;
    for (const auto& st : window.future) truth.push_back(st.position);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pred.trajectories.size(); ++i) {
        const double a = ade(truth, pred.trajectories[i]);
        if (a < best) {
            best = a;
            pred.best_index = static_cast<int>(i);
        }
    }
    return pred;
}

MetricReport evaluate_best_of_k(const Predictor& model,
                                const std::vector<traj::TrajectoryWindow>& windows,
                                const traj::LaneGeometry& lanes, int k) {
    MetricReport rep;
    rep.k = k;
    if (windows.empty()) return rep;
    const int t_pred = windows.front().t_pred();
    const double dt = windows.front().dt;
    const int seconds = static_cast<int>(std::floor(t_pred * dt + 1e-9));
    std::vector<double> horizon_sq(static_cast<std::size_t>(seconds), 0.0);

    for (const auto& w : windows) {
        auto pred = predict(model, w, lanes, k);
        std::vector<Vec2> truth;
        for (const auto& st : w.future) truth.push_back(st.position);

        const auto& best = pred.trajectories[static_cast<std::size_t>(pred.best_index)];
        rep.ade += ade(truth, best);
        rep.fde += fde(truth, best);
        rep.rmse += rmse(truth, best);
        for (int s = 1; s <= seconds; ++s) {
            const int idx = static_cast<int>(std::lround(s / dt)) - 1;
            if (idx >= 0 && idx < t_pred)
                horizon_sq[static_cast<std::size_t>(s - 1)] +=
                    (truth[static_cast<std::size_t>(idx)] - best[static_cast<std::size_t>(idx)])
                        .squaredNorm();
        }
        for (std::size_t i = 0; i < pred.trajectories.size(); ++i) {
            const double p = pred.probabilities(static_cast<int>(i));
            rep.ade_weighted += p * ade(truth, pred.trajectories[i]);
            rep.fde_weighted += p * fde(truth, pred.trajectories[i]);
            rep.rmse_weighted += p * rmse(truth, pred.trajectories[i]);
        }
    }
    const double n = static_cast<double>(windows.size());
    rep.ade /= n;
    rep.fde /= n;
    rep.rmse /= n;
    rep.ade_weighted /= n;
    rep.fde_weighted /= n;
    rep.rmse_weighted /= n;
    for (double sq : horizon_sq) rep.horizon_rmse.push_back(std::sqrt(sq / n));
    rep.sample_count = windows.size();
    return rep;
}

namespace {

std::vector<modes::Trajectory> normalized_futures(const std::vector<traj::TrajectoryWindow>& windows) {
    std::vector<modes::Trajectory> futures;
    for (const auto& w : windows) {
        auto [norm, tf] = traj::normalize(w);
        modes::Trajectory t(norm.t_pred(), 2);
        for (int i = 0; i < norm.t_pred(); ++i)
            t.row(i) = norm.future[static_cast<std::size_t>(i)].position.transpose();
        futures.push_back(std::move(t));
        (void)tf;
    }
    return futures;
}

std::vector<nsf::Sample> normalized_samples(const std::vector<traj::TrajectoryWindow>& windows,
                                            const traj::LaneGeometry& lanes) {
    std::vector<nsf::Sample> samples;
    for (const auto& w : windows) {
        auto [norm, tf] = traj::normalize(w);
        samples.push_back({std::move(norm), lanes.transformed(tf)});
    }
    return samples;
}

}  // namespace

std::vector<AblationResult> run_ablation(const std::vector<traj::TrajectoryWindow>& train_windows,
                                         const std::vector<traj::TrajectoryWindow>& eval_windows,
                                         const traj::LaneGeometry& lanes, const AblationConfig& cfg) {
    auto futures = normalized_futures(train_windows);

    // intention-mode variant and its single-mean replacement
    auto modes_full = modes::fit_modes(futures, cfg.goal_cfg.L, cfg.goal_cfg.seed);
    auto modes_mean = modes::fit_modes(futures, 1, cfg.goal_cfg.seed);

    std::vector<traj::TrajectoryWindow> train_norm;
    for (const auto& w : train_windows) train_norm.push_back(traj::normalize(w).first);

    nn::ParamStore goal_full, goal_mean;
    goalnet::GoalNetConfig cfg_full = cfg.goal_cfg;
    goalnet::init_params(goal_full, cfg_full);
    goalnet::train(goal_full, cfg_full, train_norm, modes_full);

    goalnet::GoalNetConfig cfg_mean = cfg.goal_cfg;
    cfg_mean.L = 1;
    goalnet::init_params(goal_mean, cfg_mean);
    goalnet::train(goal_mean, cfg_mean, train_norm, modes_mean);

    // force model is trained once on ground-truth goals; variants differ in
    // which goal source feeds it and whether repulsion is active
    nn::ParamStore nsf_params;
    nsf::init_params(nsf_params, cfg.nsf_cfg);
    auto samples = normalized_samples(train_windows, lanes);
    nsf::train(nsf_params, cfg.nsf_cfg, samples);

    auto make_predictor = [&](bool im, bool rep) {
        Predictor p;
        p.modes = im ? &modes_full : &modes_mean;
        p.goal_params = im ? &goal_full : &goal_mean;
        p.goal_cfg = im ? cfg_full : cfg_mean;
        p.nsf_params = &nsf_params;
        p.nsf_cfg = cfg.nsf_cfg;
        p.repulsion_on = rep;
        return p;
    };

    std::vector<AblationResult> results;
    const std::vector<AblationVariant> grid{
        {"(1)", false, true, true},
        {"(2)", false, true, false},
        {"(3)", true, true, false},
        {"(4)", true, true, true},
    };
    for (const auto& variant : grid) {
        auto predictor = make_predictor(variant.intention_modes, variant.f_rep);
        const int k = variant.intention_modes ? cfg.k : 1;
        AblationResult r;
        r.variant = variant;
        r.report = evaluate_best_of_k(predictor, eval_windows, lanes, k);
        results.push_back(std::move(r));
    }
    return results;
}

std::string format_report_table(const std::vector<std::pair<std::string, MetricReport>>& rows) {
    std::ostringstream os;
    os << "variant          ADE      FDE      RMSE     wADE     wFDE     wRMSE    K   samples\n";
    for (const auto& [name, r] : rows) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-14s %8.4f %8.4f %8.4f %8.4f %8.4f %8.4f  %2d  %6zu\n",
                      name.c_str(), r.ade, r.fde, r.rmse, r.ade_weighted, r.fde_weighted,
                      r.rmse_weighted, r.k, r.sample_count);
        os << buf;
    }
    return os.str();
}

void write_report_csv(const std::vector<std::pair<std::string, MetricReport>>& rows,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "variant,ade,fde,rmse,ade_weighted,fde_weighted,rmse_weighted,k,samples";
    std::size_t max_h = 0;
    for (const auto& [_, r] : rows) max_h = std::max(max_h, r.horizon_rmse.size());
    for (std::size_t s = 1; s <= max_h; ++s) out << ",rmse_" << s << "s";
    out << "\n";
    for (const auto& [name, r] : rows) {
        out << name << ',' << fmt_fixed(r.ade) << ',' << fmt_fixed(r.fde) << ',' << fmt_fixed(r.rmse)
            << ',' << fmt_fixed(r.ade_weighted) << ',' << fmt_fixed(r.fde_weighted) << ','
            << fmt_fixed(r.rmse_weighted) << ',' << r.k << ',' << r.sample_count;
        for (std::size_t s = 0; s < max_h; ++s)
            out << ',' << (s < r.horizon_rmse.size() ? fmt_fixed(r.horizon_rmse[s]) : "");
        out << "\n";
    }
}

}  // namespace gnp::eval
