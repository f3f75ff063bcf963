#include "gnp/eval.hpp"

#include <cmath>

namespace gnp::eval {

double ade(const std::vector<Vec2>& truth, const std::vector<Vec2>& pred) {
    if (truth.size() != pred.size()) throw ShapeError("ade: trajectory lengths differ");
    if (truth.empty()) throw ShapeError("ade: empty trajectories");
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) sum += (truth[i] - pred[i]).norm();
    return sum / static_cast<double>(truth.size());
}

double fde(const std::vector<Vec2>& truth, const std::vector<Vec2>& pred) {
    if (truth.empty() || pred.empty()) throw ShapeError("fde: empty trajectories");
    return (truth.back() - pred.back()).norm();
}

double rmse(const std::vector<Vec2>& truth, const std::vector<Vec2>& pred) {
    if (truth.size() != pred.size()) throw ShapeError("rmse: trajectory lengths differ");
    if (truth.empty()) throw ShapeError("rmse: empty trajectories");
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) sum += (truth[i] - pred[i]).squaredNorm();
    return std::sqrt(sum / static_cast<double>(truth.size()));
}

std::vector<Vec2> baseline_cv(const traj::TrajectoryWindow& window) {
    if (window.observed.size() < 2) throw DataError("baseline_cv needs at least 2 observed frames");
    const Vec2 p = window.observed.back().position;
    const Vec2 v = (p - window.observed[window.observed.size() - 2].position) / window.dt;
    std::vector<Vec2> out;
    for (int k = 1; k <= window.t_pred(); ++k) out.push_back(p + k * window.dt * v);
    return out;
}

std::vector<Vec2> baseline_ca(const traj::TrajectoryWindow& window) {
    if (window.observed.size() < 3) throw DataError("baseline_ca needs at least 3 observed frames");
    const std::size_t n = window.observed.size();
    const Vec2 p0 = window.observed[n - 3].position;
    const Vec2 p1 = window.observed[n - 2].position;
    const Vec2 p2 = window.observed[n - 1].position;
    const double dt = window.dt;
    const Vec2 a = (p2 - 2.0 * p1 + p0) / (dt * dt);
    const Vec2 v = (p2 - p1) / dt + 0.5 * a * dt;  // exact for uniform acceleration
    std::vector<Vec2> out;
    for (int k = 1; k <= window.t_pred(); ++k) {
        const double t = k * dt;
        out.push_back(p2 + v * t + 0.5 * a * t * t);
    }
    return out;
}

MetricReport evaluate_baseline(const std::vector<traj::TrajectoryWindow>& windows, bool accel) {
    MetricReport rep;
    rep.k = 1;
    if (windows.empty()) return rep;
    const int t_pred = windows.front().t_pred();
    const double dt = windows.front().dt;
    const int seconds = static_cast<int>(std::floor(t_pred * dt + 1e-9));
    std::vector<double> horizon_sq(static_cast<std::size_t>(seconds), 0.0);

    for (const auto& w : windows) {
        std::vector<Vec2> truth;
        for (const auto& st : w.future) truth.push_back(st.position);
        auto pred = accel ? baseline_ca(w) : baseline_cv(w);
        rep.ade += ade(truth, pred);
        rep.fde += fde(truth, pred);
        rep.rmse += rmse(truth, pred);
        for (int s = 1; s <= seconds; ++s) {
            const int idx = static_cast<int>(std::lround(s / dt)) - 1;
            if (idx >= 0 && idx < t_pred)
                horizon_sq[static_cast<std::size_t>(s - 1)] +=
                    (truth[static_cast<std::size_t>(idx)] - pred[static_cast<std::size_t>(idx)])
                        .squaredNorm();
        }
    }
    const double n = static_cast<double>(windows.size());
    rep.ade /= n;
    rep.fde /= n;
    rep.rmse /= n;
    rep.ade_weighted = rep.ade;
    rep.fde_weighted = rep.fde;
    rep.rmse_weighted = rep.rmse;
    for (double sq : horizon_sq) rep.horizon_rmse.push_back(std::sqrt(sq / n));
    rep.sample_count = windows.size();
    return rep;
}

}  // namespace gnp::eval
