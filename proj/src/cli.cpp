#include "gnp/cli.hpp"

#include "gnp/config.hpp"
#include "gnp/eval.hpp"
#include "gnp/goalnet.hpp"
#include "gnp/modes.hpp"
#include "gnp/nn/optimizer.hpp"
#include "gnp/nsf.hpp"
#include "gnp/svg.hpp"
#include "gnp/synthgen.hpp"
#include "gnp/trajdata.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace gnp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

const char* version_string() {
#ifdef GNP_VERSION
    return "gnp-" GNP_VERSION;
#else
    return "gnp-dev";
#endif
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void ensure_input(const std::string& path, const std::string& what, const std::string& producer) {
    if (path.empty() || !fs::exists(path))
        throw DataError(what + " not found at '" + path + "'; produce it with `gnp " + producer +
                        "` or point the config at an existing file");
}

void write_manifest(const RunConfig& cfg, const std::string& command,
                    const std::vector<std::string>& outputs) {
    json j;
    j["command"] = command;
    j["version"] = version_string();
    j["seed"] = cfg.seed;
    j["config_hash"] = hex64(cfg.hash());
    json cfgj;
    for (const auto& line : [&] {
             std::vector<std::pair<std::string, std::string>> kvs;
             std::istringstream ss(cfg.canonical_dump());
             std::string l;
             while (std::getline(ss, l)) {
                 auto eq = l.find('=');
                 if (eq != std::string::npos) kvs.emplace_back(l.substr(0, eq), l.substr(eq + 1));
             }
             return kvs;
         }())
        cfgj[line.first] = line.second;
    j["config"] = cfgj;
    j["outputs"] = outputs;
    std::ofstream out(fs::path(cfg.out_dir) / "manifest.json");
    if (!out) throw DataError("cannot write manifest under " + cfg.out_dir);
    out << j.dump(2) << "\n";
}

traj::Schema schema_from(const RunConfig& cfg) {
    if (cfg.schema == "ngsim") return traj::Schema::NgsimLike;
    if (cfg.schema == "highd") return traj::Schema::HighdLike;
    return traj::Schema::Canonical;
}

traj::NeighborRule rule_from(const RunConfig& cfg) {
    traj::NeighborRule rule;
    rule.longitudinal_range = cfg.neighbor_radius;
    rule.lateral_range = cfg.neighbor_lateral;
    rule.max_count = cfg.neighbor_max;
    return rule;
}

synth::ScenarioSpec spec_from(const RunConfig& cfg) {
    synth::ScenarioSpec spec;
    spec.lane_count = cfg.gen_lane_count;
    spec.lane_width = cfg.gen_lane_width;
    spec.duration = cfg.gen_duration;
    spec.dt = cfg.dt;
    spec.vehicle_count = cfg.gen_vehicle_count;
    spec.maneuver_mix = {cfg.gen_mix_straight, cfg.gen_mix_left, cfg.gen_mix_right};
    spec.speed_range = {cfg.gen_speed_min, cfg.gen_speed_max};
    spec.seed = cfg.seed;
    return spec;
}

goalnet::GoalNetConfig goal_cfg_from(const RunConfig& cfg) {
    goalnet::GoalNetConfig g;
    g.L = cfg.modes_count;
    g.d_model = cfg.goal_d_model;
    g.heads = cfg.goal_heads;
    g.blocks = cfg.goal_blocks;
    g.d_ffn = cfg.goal_ffn;
    g.goal_head_hidden = cfg.goal_head_hidden;
    g.t_obs = cfg.t_obs;
    g.t_pred = cfg.t_pred;
    g.n_max = cfg.neighbor_max;
    g.lambda_ce = cfg.goal_lambda;
    g.rate = cfg.goal_rate;
    g.epochs = cfg.goal_epochs;
    g.batch = cfg.goal_batch;
    g.seed = cfg.seed;
    g.basis = modes::basis_from_name(cfg.modes_basis);
    return g;
}

nsf::NsfConfig nsf_cfg_from(const RunConfig& cfg) {
    nsf::NsfConfig n;
    n.r_col = cfg.nsf_r_col;
    n.a = cfg.nsf_a;
    n.eps_line = cfg.nsf_eps_line;
    n.tau_min = cfg.nsf_tau_min;
    n.history = cfg.nsf_history;
    n.embed_dim = cfg.nsf_embed;
    n.lstm_hidden = cfg.nsf_lstm_hidden;
    n.mlp_hidden = cfg.nsf_mlp_hidden;
    n.rate = cfg.nsf_rate;
    n.epochs_phase1 = cfg.nsf_epochs_phase1;
    n.epochs_phase2 = cfg.nsf_epochs_phase2;
    n.batch = cfg.nsf_batch;
    n.joint_phase2 = cfg.nsf_joint_phase2;
    n.seed = cfg.seed;
    return n;
}

struct LoadedWindows {
    std::vector<traj::TrajectoryWindow> all, train, eval;
    traj::LaneGeometry lanes;
};

LoadedWindows load_windows(const RunConfig& cfg) {
    ensure_input(cfg.dataset, "dataset", "generate");
    ensure_input(cfg.lanes, "lane geometry", "generate");
    LoadedWindows lw;
    auto ds = traj::load_trajectories(cfg.dataset, schema_from(cfg), cfg.dt);
    lw.lanes = traj::LaneGeometry::load(cfg.lanes);
    lw.all = traj::make_windows(ds, cfg.t_obs, cfg.t_pred, cfg.stride, rule_from(cfg));
    const int period = std::max(2, static_cast<int>(std::lround(1.0 / (1.0 - cfg.eval_split))));
    for (std::size_t i = 0; i < lw.all.size(); ++i) {
        if (static_cast<int>(i % static_cast<std::size_t>(period)) == period - 1)
            lw.eval.push_back(lw.all[i]);
        else
            lw.train.push_back(lw.all[i]);
    }
    return lw;
}

std::vector<modes::Trajectory> futures_of(const std::vector<traj::TrajectoryWindow>& windows) {
    std::vector<modes::Trajectory> futures;
    for (const auto& w : windows) {
        auto norm = traj::normalize(w).first;
        modes::Trajectory t(norm.t_pred(), 2);
        for (int i = 0; i < norm.t_pred(); ++i)
            t.row(i) = norm.future[static_cast<std::size_t>(i)].position.transpose();
        futures.push_back(std::move(t));
    }
    return futures;
}

std::string dataset_fingerprint(const RunConfig& cfg) {
    return hex64(fnv1a64(cfg.dataset + "|" + std::to_string(cfg.t_obs) + "|" +
                         std::to_string(cfg.t_pred) + "|" + std::to_string(cfg.stride)));
}

// ---------------- commands ----------------

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
    auto scenario = synth::generate(spec_from(cfg));
    const fs::path dir(cfg.out_dir);
    traj::write_canonical_csv(scenario.dataset, (dir / "dataset.csv").string());
    synth::write_labels_csv(scenario.labels, (dir / "labels.csv").string());
    scenario.lanes.save((dir / "lanes.csv").string());
    write_manifest(cfg, "generate", {"dataset.csv", "labels.csv", "lanes.csv"});
    out << "generated " << scenario.dataset.tracks.size() << " vehicles ("
        << scenario.dataset.total_frames() << " states) into " << cfg.out_dir << "\n";
    return 0;
}

int cmd_cluster(const RunConfig& cfg, std::ostream& out) {
    auto lw = load_windows(cfg);
    auto futures = futures_of(lw.train);
    modes::FitInfo info;
    auto set = modes::fit_modes(futures, cfg.modes_count, cfg.seed, dataset_fingerprint(cfg), &info);
    const fs::path dir(cfg.out_dir);
    set.save((dir / "modes.csv").string(), (dir / "modes.meta").string());
    write_manifest(cfg, "cluster", {"modes.csv", "modes.meta"});
    out << "fitted " << set.L() << " intention modes on " << futures.size() << " futures ("
        << info.iterations << " iterations, " << (info.converged ? "converged" : "iteration cap")
        << ", inertia " << fmt_fixed(info.inertia, 3) << ")\n";
    return 0;
}

int cmd_train_goal(const RunConfig& cfg, std::ostream& out) {
    ensure_input(cfg.modes_csv, "intention modes", "cluster");
    ensure_input(cfg.modes_meta, "intention modes metadata", "cluster");
    auto lw = load_windows(cfg);
    auto modeset = modes::IntentionModeSet::load(cfg.modes_csv, cfg.modes_meta);

    std::vector<traj::TrajectoryWindow> train_norm;
    for (const auto& w : lw.train) train_norm.push_back(traj::normalize(w).first);

    auto gcfg = goal_cfg_from(cfg);
    gcfg.L = modeset.L();
    nn::ParamStore ps;
    goalnet::init_params(ps, gcfg);
    auto result = goalnet::train(ps, gcfg, train_norm, modeset);
    if (result.aborted) throw NumericsError("goal training diverged; checkpoint restored");

    const fs::path dir(cfg.out_dir);
    ps.save((dir / "goal.ckpt").string());
    {
        std::ofstream loss(dir / "goal_loss.csv");
        loss << "epoch,loss\n";
        for (std::size_t e = 0; e < result.epoch_losses.size(); ++e)
            loss << e << ',' << fmt_fixed(result.epoch_losses[e], 9) << '\n';
    }
    write_manifest(cfg, "train-goal", {"goal.ckpt", "goal_loss.csv"});
    out << "trained goal module on " << train_norm.size() << " windows; final loss "
        << fmt_fixed(result.epoch_losses.back(), 6) << "\n";
    return 0;
}

int cmd_train_nsf(const RunConfig& cfg, std::ostream& out) {
    auto lw = load_windows(cfg);
    auto ncfg = nsf_cfg_from(cfg);

    std::vector<nsf::Sample> samples;
    for (const auto& w : lw.train) {
        auto [norm, tf] = traj::normalize(w);
        samples.push_back({std::move(norm), lw.lanes.transformed(tf)});
    }

    std::vector<Vec2> predicted_goals;
    const std::vector<Vec2>* goal_override = nullptr;
    if (!cfg.nsf_oracle_goals) {
        ensure_input(cfg.modes_csv, "intention modes", "cluster");
        ensure_input(cfg.modes_meta, "intention modes metadata", "cluster");
        ensure_input(cfg.goal_checkpoint, "goal checkpoint", "train-goal");
        auto modeset = modes::IntentionModeSet::load(cfg.modes_csv, cfg.modes_meta);
        auto gps = nn::ParamStore::load(cfg.goal_checkpoint);
        auto gcfg = goal_cfg_from(cfg);
        gcfg.L = modeset.L();
        for (const auto& s : samples)
            predicted_goals.push_back(
                goalnet::sample_goals(s.window, modeset, gps, gcfg, 1).goals[0]);
        goal_override = &predicted_goals;
    }

    nn::ParamStore ps;
    nsf::init_params(ps, ncfg);
    auto result = nsf::train(ps, ncfg, samples, goal_override);
    if (result.aborted) throw NumericsError("force-model training diverged; checkpoint restored");

    const fs::path dir(cfg.out_dir);
    ps.save((dir / "nsf.ckpt").string());
    {
        std::ofstream loss(dir / "nsf_loss.csv");
        loss << "phase,epoch,loss\n";
        for (std::size_t e = 0; e < result.phase1_losses.size(); ++e)
            loss << "1," << e << ',' << fmt_fixed(result.phase1_losses[e], 9) << '\n';
        for (std::size_t e = 0; e < result.phase2_losses.size(); ++e)
            loss << "2," << e << ',' << fmt_fixed(result.phase2_losses[e], 9) << '\n';
    }
    write_manifest(cfg, "train-nsf", {"nsf.ckpt", "nsf_loss.csv"});
    out << "trained force model on " << samples.size() << " windows; phase-1 loss "
        << fmt_fixed(result.phase1_losses.empty() ? 0.0 : result.phase1_losses.back(), 6)
        << ", phase-2 loss "
        << fmt_fixed(result.phase2_losses.empty() ? 0.0 : result.phase2_losses.back(), 6) << "\n";
    return 0;
}

struct LoadedModel {
    modes::IntentionModeSet modeset;
    nn::ParamStore goal_ps;
    nn::ParamStore nsf_ps;
    goalnet::GoalNetConfig gcfg;
    nsf::NsfConfig ncfg;
};

LoadedModel load_model(const RunConfig& cfg) {
    ensure_input(cfg.modes_csv, "intention modes", "cluster");
    ensure_input(cfg.modes_meta, "intention modes metadata", "cluster");
    ensure_input(cfg.goal_checkpoint, "goal checkpoint", "train-goal");
    ensure_input(cfg.nsf_checkpoint, "force-model checkpoint", "train-nsf");
    LoadedModel m;
    m.modeset = modes::IntentionModeSet::load(cfg.modes_csv, cfg.modes_meta);
    m.goal_ps = nn::ParamStore::load(cfg.goal_checkpoint);
    m.nsf_ps = nn::ParamStore::load(cfg.nsf_checkpoint);
    m.gcfg = goal_cfg_from(cfg);
    m.gcfg.L = m.modeset.L();
    m.ncfg = nsf_cfg_from(cfg);
    return m;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
    auto lw = load_windows(cfg);
    auto model = load_model(cfg);

    eval::Predictor predictor;
    predictor.modes = &model.modeset;
    predictor.goal_params = &model.goal_ps;
    predictor.goal_cfg = model.gcfg;
    predictor.nsf_params = &model.nsf_ps;
    predictor.nsf_cfg = model.ncfg;

    auto report = eval::evaluate_best_of_k(predictor, lw.eval, lw.lanes, cfg.eval_k);
    auto cv = eval::evaluate_baseline(lw.eval, false);
    auto ca = eval::evaluate_baseline(lw.eval, true);

    std::vector<std::pair<std::string, eval::MetricReport>> rows{
        {"model-bestK", report}, {"baseline-cv", cv}, {"baseline-ca", ca}};
    const fs::path dir(cfg.out_dir);
    eval::write_report_csv(rows, (dir / "report.csv").string());
    {
        std::ofstream txt(dir / "report.txt");
        txt << eval::format_report_table(rows);
    }
    write_manifest(cfg, "eval", {"report.csv", "report.txt"});
    out << eval::format_report_table(rows);
    return 0;
}

int cmd_ablate(const RunConfig& cfg, std::ostream& out) {
    auto lw = load_windows(cfg);
    eval::AblationConfig acfg;
    acfg.goal_cfg = goal_cfg_from(cfg);
    acfg.nsf_cfg = nsf_cfg_from(cfg);
    acfg.k = cfg.eval_k;
    auto results = eval::run_ablation(lw.train, lw.eval, lw.lanes, acfg);

    std::vector<std::pair<std::string, eval::MetricReport>> rows;
    for (const auto& r : results) {
        std::string name = r.variant.name + " IM:" + (r.variant.intention_modes ? "y" : "n") +
                           " Fg:y Fr:" + (r.variant.f_rep ? "y" : "n");
        rows.emplace_back(name, r.report);
    }
    const fs::path dir(cfg.out_dir);
    eval::write_report_csv(rows, (dir / "ablation.csv").string());
    {
        std::ofstream txt(dir / "ablation.txt");
        txt << eval::format_report_table(rows);
    }
    write_manifest(cfg, "ablate", {"ablation.csv", "ablation.txt"});
    out << eval::format_report_table(rows);
    return 0;
}

void draw_lanes(svg::Document& doc, const traj::LaneGeometry& lanes, double x0, double x1) {
    for (const auto& line : lanes.lines) {
        const bool boundary = line.kind == traj::LineKind::Boundary;
        doc.line({x0, line.offset}, {x1, line.offset}, boundary ? "#222222" : "#9a9a9a",
                 boundary ? 2.0 : 1.0, !boundary);
    }
}

int cmd_plot(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir(cfg.out_dir);
    if (cfg.plot_kind == "modes") {
        ensure_input(cfg.modes_csv, "intention modes", "cluster");
        ensure_input(cfg.modes_meta, "intention modes metadata", "cluster");
        auto set = modes::IntentionModeSet::load(cfg.modes_csv, cfg.modes_meta);
        double x_max = 1.0, y_ext = 1.0;
        for (const auto& c : set.centers) {
            x_max = std::max(x_max, c.col(0).maxCoeff());
            y_ext = std::max({y_ext, std::abs(c.col(1).maxCoeff()), std::abs(c.col(1).minCoeff())});
        }
        svg::Document doc(860, 420, -5.0, x_max + 5.0, -y_ext - 1.0, y_ext + 1.0);
        const double half = 0.5 * cfg.gen_lane_width;
        for (int l = 0; l < set.L(); ++l) {
            const auto& c = set.centers[static_cast<std::size_t>(l)];
            std::vector<Vec2> pts;
            for (int i = 0; i < set.t_pred; ++i) pts.emplace_back(c(i, 0), c(i, 1));
            const double final_y = c(set.t_pred - 1, 1);
            std::string color = "#3465a4";                    // straight
            if (final_y > half) color = "#4e9a06";            // left change
            else if (final_y < -half) color = "#cc0000";      // right change
            doc.polyline(pts, color, 2.0);
        }
        doc.text({x_max * 0.02, y_ext + 0.4}, "intention modes (green: left, red: right)", 14);
        const auto path = (dir / "plot_modes.svg").string();
        doc.save(path);
        write_manifest(cfg, "plot", {"plot_modes.svg"});
        out << "wrote " << path << "\n";
        return 0;
    }

    if (cfg.plot_kind == "multimodal" || cfg.plot_kind == "forces") {
        auto lw = load_windows(cfg);
        auto model = load_model(cfg);
        if (lw.eval.empty()) throw DataError("no evaluation windows available to plot");
        const auto& window =
            lw.eval[static_cast<std::size_t>(cfg.plot_window) % lw.eval.size()];

        eval::Predictor predictor;
        predictor.modes = &model.modeset;
        predictor.goal_params = &model.goal_ps;
        predictor.goal_cfg = model.gcfg;
        predictor.nsf_params = &model.nsf_ps;
        predictor.nsf_cfg = model.ncfg;
        auto pred = eval::predict(predictor, window, lw.lanes, cfg.eval_k);

        double x0 = window.observed.front().position.x() - 10.0;
        double x1 = window.future.back().position.x() + 30.0;
        double ylo = lw.lanes.lines.front().offset - 2.0;
        double yhi = lw.lanes.lines.back().offset + 2.0;

        if (cfg.plot_kind == "multimodal") {
            svg::Document doc(900, 360, x0, x1, ylo, yhi);
            draw_lanes(doc, lw.lanes, x0, x1);
            std::vector<Vec2> hist, truth;
            for (const auto& st : window.observed) hist.push_back(st.position);
            for (const auto& st : window.future) truth.push_back(st.position);
            for (std::size_t i = 0; i < pred.trajectories.size(); ++i) {
                if (static_cast<int>(i) == pred.best_index) continue;
                doc.polyline(pred.trajectories[i], "#8ae234", 1.5);  // other hypotheses
            }
            doc.polyline(hist, "#000000", 2.0);
            doc.polyline(truth, "#888888", 2.0, true);
            doc.polyline(pred.trajectories[static_cast<std::size_t>(pred.best_index)], "#a40000",
                         2.5);
            doc.circle(hist.back(), 4.0, "#edd400");
            doc.text({x0 + 2.0, yhi - 0.5},
                     "history (black), truth (dashed), best (dark red), other hypotheses (green)",
                     13);
            const auto path = (dir / "plot_multimodal.svg").string();
            doc.save(path);
            write_manifest(cfg, "plot", {"plot_multimodal.svg"});
            out << "wrote " << path << "\n";
            return 0;
        }

        // forces: draw the scene at one rollout step with force arrows
        const auto& roll = pred.rollouts[static_cast<std::size_t>(pred.best_index)];
        const int step =
            std::min(std::max(cfg.plot_step, 0), static_cast<int>(roll.steps.size()) - 1);
        const auto& rec = roll.steps[static_cast<std::size_t>(step)];

        auto [norm, tf] = traj::normalize(window);
        const Vec2 pos_norm = step == 0 ? norm.observed.back().position
                                        : roll.positions[static_cast<std::size_t>(step - 1)];
        const Vec2 pos = tf.invert_point(pos_norm);

        svg::Document doc(900, 360, x0, x1, ylo, yhi);
        draw_lanes(doc, lw.lanes, x0, x1);
        const double arrow_scale = 8.0;  // meters drawn per m/s^2
        doc.circle(pos, 6.0, "#edd400");
        doc.arrow(pos, pos + arrow_scale * tf.invert_vector(rec.f_goal), "#c4a000", 2.5);
        for (const auto& [id, f] : rec.f_rep_vehicles) {
            doc.arrow(pos, pos + arrow_scale * tf.invert_vector(f), "#3465a4", 2.0);
            for (const auto& nb : window.neighbors)
                if (nb.present && nb.id == id) doc.circle(nb.observed.back().position, 5.0, "#3465a4");
        }
        for (const auto& [idx, f] : rec.f_rep_lines)
            doc.arrow(pos, pos + arrow_scale * tf.invert_vector(f), "#000000", 2.0);
        doc.text({x0 + 2.0, yhi - 0.5},
                 "goal force (yellow), vehicle repulsion (blue), line repulsion (black), step " +
                     std::to_string(step),
                 13);
        const auto path = (dir / "plot_forces.svg").string();
        doc.save(path);
        write_manifest(cfg, "plot", {"plot_forces.svg"});
        out << "wrote " << path << "\n";
        return 0;
    }

    throw ConfigError("unknown plot kind '" + cfg.plot_kind +
                      "'; valid kinds: modes, multimodal, forces");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"two-stage goal-based vehicle trajectory predictor"};
    app.set_version_flag("--version", version_string());

    std::string config_path, out_dir;
    unsigned long long seed = 0;
    bool seed_set = false, out_set = false;
    app.add_option("--config", config_path, "key=value configuration file");
    auto* seed_opt = app.add_option("--seed", seed, "override the configured seed");
    auto* out_opt = app.add_option("--out", out_dir, "output directory");

    std::string plot_kind;
    int plot_window = -1, plot_step = -1;

    const std::vector<std::string> commands{"generate", "cluster",  "train-goal", "train-nsf",
                                            "eval",     "ablate",   "plot"};
    for (const auto& name : commands) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();  // global flags may follow the subcommand
        if (name == "plot") {
            sub->add_option("--kind", plot_kind, "modes | multimodal | forces");
            sub->add_option("--window", plot_window, "window index to draw");
            sub->add_option("--step", plot_step, "rollout step for the forces plot");
        }
    }
    app.require_subcommand(1);

    try {
        std::vector<std::string> mutable_args(args.rbegin(), args.rend());
        app.parse(std::move(mutable_args));
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }
    seed_set = seed_opt->count() > 0;
    out_set = out_opt->count() > 0;

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
        if (seed_set) cfg.seed = seed;
        if (out_set) cfg.out_dir = out_dir;
        if (!plot_kind.empty()) cfg.plot_kind = plot_kind;
        if (plot_window >= 0) cfg.plot_window = plot_window;
        if (plot_step >= 0) cfg.plot_step = plot_step;
        cfg.validate();
        fs::create_directories(cfg.out_dir);

        for (const auto& name : commands) {
            if (!app.got_subcommand(name)) continue;
            if (name == "generate") return cmd_generate(cfg, out);
            if (name == "cluster") return cmd_cluster(cfg, out);
            if (name == "train-goal") return cmd_train_goal(cfg, out);
            if (name == "train-nsf") return cmd_train_nsf(cfg, out);
            if (name == "eval") return cmd_eval(cfg, out);
            if (name == "ablate") return cmd_ablate(cfg, out);
            if (name == "plot") return cmd_plot(cfg, out);
        }
        err << "error: no command selected\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace gnp::cli
