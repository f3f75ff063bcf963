#include "gnp/nsf.hpp"

#include "gnp/nn/layers.hpp"
#include "gnp/nn/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace gnp::nsf {

using nn::Graph;
using nn::ParamStore;
using nn::Tensor;

namespace {

// fixed feature scales; raw meters and m/s are too large for unit-scale nets
constexpr double kVelScale = 0.1;
constexpr double kGoalScale = 0.02;
constexpr double kRelScale = 0.1;
constexpr double kLineScale = 0.2;

Tensor state_feature(const Vec2& velocity, const Vec2& goal_offset) {
    Tensor t = Tensor::zeros({4});
    t.data << velocity.x() * kVelScale, velocity.y() * kVelScale, goal_offset.x() * kGoalScale,
        goal_offset.y() * kGoalScale;
    return t;
}

}  // namespace

void init_params(ParamStore& ps, const NsfConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    nn::init_linear(ps, "tau.enc", 4, cfg.embed_dim, rng);
    nn::init_lstm(ps, "tau.lstm", cfg.embed_dim, cfg.lstm_hidden, rng);
    nn::init_linear(ps, "tau.hproj", cfg.lstm_hidden, cfg.embed_dim, rng);
    nn::init_linear(ps, "tau.goal", 2, cfg.embed_dim, rng);
    nn::init_mlp(ps, "tau.mlp", {2 * cfg.embed_dim, cfg.mlp_hidden, 1}, rng);

    nn::init_linear(ps, "k.enct", 2, cfg.embed_dim, rng);
    nn::init_linear(ps, "k.encj", 4, cfg.embed_dim, rng);
    nn::init_linear(ps, "k.encl", 3, cfg.embed_dim, rng);
    nn::init_mlp(ps, "k.mlpv", {2 * cfg.embed_dim, cfg.mlp_hidden, 1}, rng);
    nn::init_mlp(ps, "k.mlpl", {2 * cfg.embed_dim, cfg.mlp_hidden, 1}, rng);
    // start with weak repulsion so phase 2 perturbs the phase-1 fit gently
    ps.value("k.mlpv.l1.b").data.setConstant(-3.0);
    ps.value("k.mlpl.l1.b").data.setConstant(-3.0);
}

Graph::NodeId tau_network(Graph& g, ParamStore& ps, const NsfConfig& cfg,
                          const std::vector<Graph::NodeId>& recent_features,
                          Graph::NodeId goal_offset) {
    if (recent_features.empty()) throw ShapeError("tau_network: empty history");
    auto state = nn::lstm_zero_state(g, cfg.lstm_hidden);
    for (auto feat : recent_features) {
        auto enc = g.relu(nn::linear(g, ps, feat, "tau.enc"));
        state = nn::lstm_step(g, ps, enc, state, "tau.lstm");
    }
    auto hproj = nn::linear(g, ps, state.hidden, "tau.hproj");
    auto goal_emb = g.relu(nn::linear(g, ps, g.scale(goal_offset, kGoalScale), "tau.goal"));
    auto raw = nn::mlp(g, ps, g.concat_vec({hproj, goal_emb}), "tau.mlp", 2);
    return g.adds(g.softplus(raw), g.constant(Tensor::scalar(cfg.tau_min)));
}

KValues k_network(Graph& g, ParamStore& ps, const NsfConfig& cfg, Graph::NodeId target_velocity,
                  const std::vector<Graph::NodeId>& neighbor_features,
                  const std::vector<Graph::NodeId>& line_features) {
    auto enc_t = g.relu(nn::linear(g, ps, g.scale(target_velocity, kVelScale), "k.enct"));
    KValues out;
    for (auto nf : neighbor_features) {
        auto enc_j = g.relu(nn::linear(g, ps, nf, "k.encj"));
        auto raw = nn::mlp(g, ps, g.concat_cols(enc_t, enc_j), "k.mlpv", 2);
        out.vehicles.push_back(g.scale(g.sigmoid(raw), cfg.a));
    }
    for (auto lf : line_features) {
        auto enc_l = g.relu(nn::linear(g, ps, lf, "k.encl"));
        auto raw = nn::mlp(g, ps, g.concat_cols(enc_t, enc_l), "k.mlpl", 2);
        out.lines.push_back(g.scale(g.sigmoid(raw), cfg.a));
    }
    return out;
}

RolloutTape rollout_tape(Graph& g, ParamStore& ps, const NsfConfig& cfg, const Sample& sample,
                         const Vec2& goal, bool repulsion_on) {
    const auto& win = sample.window;
    const int t_pred = win.t_pred();
    const double dt = win.dt;
    if (t_pred < 1) throw DataError("rollout: window has no future span");
    if (win.observed.empty()) throw DataError("rollout: window has no observed span");

    const Tensor goal_t = Tensor::vec2(goal);
    auto goal_node = g.constant(goal_t);

    // recent-state feature history seeded from the observed tail
    std::vector<Graph::NodeId> history;
    const int seed_count = std::min<int>(cfg.history, static_cast<int>(win.observed.size()));
    for (int i = static_cast<int>(win.observed.size()) - seed_count;
         i < static_cast<int>(win.observed.size()); ++i) {
        const auto& st = win.observed[static_cast<std::size_t>(i)];
        history.push_back(g.constant(state_feature(st.velocity, goal - st.position)));
    }

    // neighbors move at constant velocity from their last observed state
    struct NeighborPath {
        long id;
        Vec2 p0, v;
    };
    std::vector<NeighborPath> neighbors;
    if (repulsion_on) {
        for (const auto& nb : win.neighbors) {
            if (!nb.present) continue;
            neighbors.push_back({nb.id, nb.observed.back().position, nb.observed.back().velocity});
        }
    }

    auto zero1 = g.constant(Tensor::scalar(0.0));

    RolloutTape tape;
    auto p = g.constant(Tensor::vec2(win.observed.back().position));
    auto v = g.constant(Tensor::vec2(win.observed.back().velocity));

    for (int step = 0; step < t_pred; ++step) {
        RolloutTape::StepRecord rec;

        // tau
        Graph::NodeId tau;
        if (cfg.fixed_tau > 0.0) {
            tau = g.constant(Tensor::scalar(cfg.fixed_tau));
        } else {
            std::vector<Graph::NodeId> recent(history.end() - std::min<std::size_t>(history.size(),
                                                                 static_cast<std::size_t>(cfg.history)),
                                              history.end());
            tau = tau_network(g, ps, cfg, recent, g.sub(goal_node, p));
        }
        rec.tau = tau;

        // desired velocity: (goal - p) / ((T - t) dt); the norm cancels
        const double remaining = (t_pred - step) * dt;
        auto v_des = g.scale(g.sub(goal_node, p), 1.0 / remaining);
        {
            const Vec2 pv(g.value(p).data(0), g.value(p).data(1));
            auto dv = desired_velocity(pv, goal, step, t_pred, dt);
            rec.v0 = dv.v0;
            rec.direction = dv.direction;
        }

        auto f_goal = g.sdiv(g.sub(v_des, v), tau);
        rec.f_goal = f_goal;
        std::vector<Graph::NodeId> force_terms{f_goal};

        if (repulsion_on) {
            // k values from the networks
            std::vector<Graph::NodeId> nb_feats;
            std::vector<Vec2> nb_pos;
            for (const auto& nb : neighbors) {
                const Vec2 pj = nb.p0 + (step + 1) * dt * nb.v;
                nb_pos.push_back(pj);
                auto rel_p = g.scale(g.sub(p, g.constant(Tensor::vec2(pj))), kRelScale);
                auto rel_v = g.scale(g.sub(v, g.constant(Tensor::vec2(nb.v))), kVelScale);
                nb_feats.push_back(g.concat_vec({rel_p, rel_v}));
            }
            std::vector<Graph::NodeId> line_feats;
            for (const auto& line : sample.lanes.lines) {
                auto s = g.scale(g.sub(g.elem(p, 1), g.constant(Tensor::scalar(line.offset))),
                                 kLineScale);
                const bool is_center = line.kind == traj::LineKind::Center;
                Tensor onehot = Tensor::zeros({2});
                onehot.data << (is_center ? 1.0 : 0.0), (is_center ? 0.0 : 1.0);
                line_feats.push_back(g.concat_vec({s, g.constant(onehot)}));
            }
            auto ks = k_network(g, ps, cfg, v, nb_feats, line_feats);
            rec.k_vehicles = ks.vehicles;
            rec.k_lines = ks.lines;

            // vehicle repulsion: k exp(-|r|/r_col) r/|r|
            for (std::size_t j = 0; j < neighbors.size(); ++j) {
                auto r = g.sub(p, g.constant(Tensor::vec2(nb_pos[j])));
                auto dist = g.vnorm(r);
                Graph::NodeId force;
                if (g.value(dist).data(0) < cfg.eps_pos) {
                    ++rec.coincident_events;
                    const double ry = g.value(r).data(1);
                    const Vec2 dir(0.0, ry < 0.0 ? -1.0 : 1.0);
                    auto mag = g.scale(ks.vehicles[j], std::exp(-cfg.eps_pos / cfg.r_col));
                    force = g.smul(g.constant(Tensor::vec2(dir)), mag);
                } else {
                    auto dir = g.sdiv(r, dist);
                    auto mag = g.mul(ks.vehicles[j], g.exp_op(g.scale(dist, -1.0 / cfg.r_col)));
                    force = g.smul(dir, mag);
                }
                rec.f_vehicles.emplace_back(neighbors[j].id, force);
                force_terms.push_back(force);
            }

            // line repulsion, lateral only
            for (std::size_t l = 0; l < sample.lanes.lines.size(); ++l) {
                const auto& line = sample.lanes.lines[l];
                auto s = g.sub(g.elem(p, 1), g.constant(Tensor::scalar(line.offset)));
                Graph::NodeId fy;
                if (line.kind == traj::LineKind::Center) {
                    auto e = g.exp_op(g.scale(g.mul(s, s), -1.0));
                    fy = g.scale(g.mul(g.mul(ks.lines[l], s), e), 2.0);
                } else {
                    bool clamped = false;
                    auto sc = g.clamp_abs_min(s, cfg.eps_line, &clamped);
                    if (clamped) ++rec.clamp_events;
                    auto cube = g.mul(g.mul(sc, sc), sc);
                    fy = g.sdiv(ks.lines[l], cube);
                }
                auto force = g.concat_vec({zero1, fy});
                rec.f_lines.emplace_back(static_cast<int>(l), force);
                force_terms.push_back(force);
            }
        }

        Graph::NodeId acc;
        try {
            acc = g.addn(force_terms);
            rec.acceleration = acc;
            // first-order expansion: p advances with the old velocity
            p = g.add(p, g.scale(v, dt));
            v = g.add(v, g.scale(acc, dt));
        } catch (const NumericsError& e) {
            throw NumericsError("rollout diverged at step " + std::to_string(step) + " (tau=" +
                                std::to_string(g.value(rec.tau).data(0)) + "): " + e.what());
        }

        tape.positions.push_back(p);
        tape.velocities.push_back(v);
        tape.steps.push_back(std::move(rec));

        if (cfg.fixed_tau <= 0.0) {
            history.push_back(g.concat_vec(
                {g.scale(v, kVelScale), g.scale(g.sub(goal_node, p), kGoalScale)}));
            if (static_cast<int>(history.size()) > cfg.history) history.erase(history.begin());
        }
    }
    return tape;
}

RolloutResult rollout(const Sample& sample, const Vec2& goal, ParamStore& ps, const NsfConfig& cfg,
                      bool repulsion_on) {
    Graph g;
    auto tape = rollout_tape(g, ps, cfg, sample, goal, repulsion_on);
    RolloutResult out;
    for (std::size_t i = 0; i < tape.positions.size(); ++i) {
        out.positions.emplace_back(g.value(tape.positions[i]).data(0),
                                   g.value(tape.positions[i]).data(1));
        out.velocities.emplace_back(g.value(tape.velocities[i]).data(0),
                                    g.value(tape.velocities[i]).data(1));
    }
    for (const auto& rec : tape.steps) {
        ForceBreakdown b;
        b.f_goal = Vec2(g.value(rec.f_goal).data(0), g.value(rec.f_goal).data(1));
        b.acceleration = Vec2(g.value(rec.acceleration).data(0), g.value(rec.acceleration).data(1));
        b.tau = g.value(rec.tau).data(0);
        b.v0 = rec.v0;
        b.direction = rec.direction;
        b.clamp_events = rec.clamp_events;
        b.coincident_events = rec.coincident_events;
        for (const auto& [id, node] : rec.f_vehicles)
            b.f_rep_vehicles.emplace_back(id, Vec2(g.value(node).data(0), g.value(node).data(1)));
        for (const auto& [idx, node] : rec.f_lines)
            b.f_rep_lines.emplace_back(idx, Vec2(g.value(node).data(0), g.value(node).data(1)));
        for (auto node : rec.k_vehicles) b.k_vehicles.push_back(g.value(node).data(0));
        for (auto node : rec.k_lines) b.k_lines.push_back(g.value(node).data(0));
        out.steps.push_back(std::move(b));
    }
    return out;
}

Graph::NodeId rollout_mse(Graph& g, const RolloutTape& tape, const traj::TrajectoryWindow& window) {
    if (tape.positions.size() != window.future.size())
        throw ShapeError("rollout_mse: prediction and future lengths differ");
    auto pred = g.stack_rows(tape.positions);
    Tensor truth = Tensor::zeros({static_cast<int>(window.future.size()), 2});
    for (std::size_t i = 0; i < window.future.size(); ++i) {
        truth.at(static_cast<int>(i), 0) = window.future[i].position.x();
        truth.at(static_cast<int>(i), 1) = window.future[i].position.y();
    }
    return g.mse(pred, truth);
}

namespace {

double run_phase(ParamStore& ps, const NsfConfig& cfg, const std::vector<Sample>& samples,
                 const std::vector<Vec2>* goal_override, bool repulsion_on,
                 const std::vector<std::string>& train_prefixes, int epochs,
                 std::vector<double>& losses, std::mt19937_64& shuffle_rng) {
    nn::AdamConfig adam;
    adam.rate = cfg.rate;
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    ParamStore snapshot = ps;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_loss = 0.0;
        bool diverged = false;
        std::size_t cursor = 0;
        while (cursor < order.size()) {
            const std::size_t batch_end =
                std::min(order.size(), cursor + static_cast<std::size_t>(cfg.batch));
            const double inv_batch = 1.0 / static_cast<double>(batch_end - cursor);
            ps.zero_grads();
            try {
                for (std::size_t i = cursor; i < batch_end; ++i) {
                    const Sample& s = samples[order[i]];
                    const Vec2 goal = goal_override ? (*goal_override)[order[i]]
                                                    : s.window.future.back().position;
                    Graph g;
                    auto tape = rollout_tape(g, ps, cfg, s, goal, repulsion_on);
                    auto loss = rollout_mse(g, tape, s.window);
                    epoch_loss += g.value(loss).data(0);
                    g.backward(g.scale(loss, inv_batch));
                }
                adam_step(ps, adam, &train_prefixes);
            } catch (const NumericsError&) {
                diverged = true;
                break;
            }
            cursor = batch_end;
        }
        epoch_loss /= static_cast<double>(samples.size());
        if (diverged || !std::isfinite(epoch_loss)) {
            ps = snapshot;
            return -1.0;  // abort marker
        }
        losses.push_back(epoch_loss);
        snapshot = ps;
    }
    return losses.empty() ? 0.0 : losses.back();
}

}  // namespace

TrainResult train(ParamStore& ps, const NsfConfig& cfg, const std::vector<Sample>& samples,
                  const std::vector<Vec2>* goal_override) {
    if (samples.empty()) throw DataError("train: no samples");
    if (goal_override && goal_override->size() != samples.size())
        throw ShapeError("train: goal_override must provide one goal per sample");
    TrainResult result;
    std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, 0x5f5f));

    const std::vector<std::string> tau_only{"tau."};
    if (run_phase(ps, cfg, samples, goal_override, /*repulsion_on=*/false, tau_only,
                  cfg.epochs_phase1, result.phase1_losses, shuffle_rng) < 0.0) {
        result.aborted = true;
        return result;
    }

    std::vector<std::string> phase2_prefixes{"k."};
    if (cfg.joint_phase2) phase2_prefixes.push_back("tau.");
    if (run_phase(ps, cfg, samples, goal_override, /*repulsion_on=*/true, phase2_prefixes,
                  cfg.epochs_phase2, result.phase2_losses, shuffle_rng) < 0.0) {
        result.aborted = true;
        return result;
    }
    return result;
}

void write_breakdown_csv(const RolloutResult& result, double dt, const std::string& csv_path,
                         const std::string& jsonl_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw DataError("cannot open for writing: " + csv_path);
    csv << "step,fx_goal,fy_goal,fx_rep,fy_rep,tau,v0\n";
    for (std::size_t i = 0; i < result.steps.size(); ++i) {
        const auto& s = result.steps[i];
        Vec2 rep = Vec2::Zero();
        for (const auto& [_, f] : s.f_rep_vehicles) rep += f;
        for (const auto& [_, f] : s.f_rep_lines) rep += f;
        csv << i << ',' << fmt_fixed(s.f_goal.x()) << ',' << fmt_fixed(s.f_goal.y()) << ','
            << fmt_fixed(rep.x()) << ',' << fmt_fixed(rep.y()) << ',' << fmt_fixed(s.tau) << ','
            << fmt_fixed(s.v0) << '\n';
    }
    std::ofstream jsonl(jsonl_path);
    if (!jsonl) throw DataError("cannot open for writing: " + jsonl_path);
    for (std::size_t i = 0; i < result.steps.size(); ++i) {
        const auto& s = result.steps[i];
        jsonl << "{\"step\":" << i << ",\"t\":" << fmt_fixed(static_cast<double>(i + 1) * dt, 3)
              << ",\"tau\":" << fmt_fixed(s.tau) << ",\"vehicles\":[";
        for (std::size_t j = 0; j < s.f_rep_vehicles.size(); ++j) {
            if (j) jsonl << ',';
            jsonl << "{\"id\":" << s.f_rep_vehicles[j].first << ",\"fx\":"
                  << fmt_fixed(s.f_rep_vehicles[j].second.x()) << ",\"fy\":"
                  << fmt_fixed(s.f_rep_vehicles[j].second.y()) << ",\"k\":"
                  << fmt_fixed(j < s.k_vehicles.size() ? s.k_vehicles[j] : 0.0) << "}";
        }
        jsonl << "],\"lines\":[";
        for (std::size_t l = 0; l < s.f_rep_lines.size(); ++l) {
            if (l) jsonl << ',';
            jsonl << "{\"index\":" << s.f_rep_lines[l].first << ",\"fy\":"
                  << fmt_fixed(s.f_rep_lines[l].second.y()) << ",\"k\":"
                  << fmt_fixed(l < s.k_lines.size() ? s.k_lines[l] : 0.0) << "}";
        }
        jsonl << "]}\n";
    }
}

}  // namespace gnp::nsf
