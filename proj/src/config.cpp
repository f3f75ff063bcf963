#include "gnp/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace gnp::cli {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

struct Field {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

std::string bool_str(bool b) { return b ? "true" : "false"; }

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

template <typename T>
T parse_num(const std::string& v, const std::string& key) {
    std::istringstream ss(v);
    T out;
    ss >> out;
    if (ss.fail() || !ss.eof()) throw ConfigError("key '" + key + "': cannot parse '" + v + "'");
    return out;
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> f;
        auto str = [&f](const std::string& key, std::string RunConfig::* member) {
            f[key] = {[member](RunConfig& c, const std::string& v) { c.*member = v; },
                      [member](const RunConfig& c) { return c.*member; }};
        };
        auto num_int = [&f](const std::string& key, int RunConfig::* member) {
            f[key] = {[member, key](RunConfig& c, const std::string& v) {
                          c.*member = parse_num<int>(v, key);
                      },
                      [member](const RunConfig& c) { return std::to_string(c.*member); }};
        };
        auto num_dbl = [&f](const std::string& key, double RunConfig::* member) {
            f[key] = {[member, key](RunConfig& c, const std::string& v) {
                          c.*member = parse_num<double>(v, key);
                      },
                      [member](const RunConfig& c) { return fmt_fixed(c.*member, 9); }};
        };
        auto boolean = [&f](const std::string& key, bool RunConfig::* member) {
            f[key] = {[member, key](RunConfig& c, const std::string& v) {
                          c.*member = parse_bool(v, key);
                      },
                      [member](const RunConfig& c) { return bool_str(c.*member); }};
        };

        str("dataset", &RunConfig::dataset);
        str("lanes", &RunConfig::lanes);
        str("labels", &RunConfig::labels);
        str("modes_csv", &RunConfig::modes_csv);
        str("modes_meta", &RunConfig::modes_meta);
        str("goal_checkpoint", &RunConfig::goal_checkpoint);
        str("nsf_checkpoint", &RunConfig::nsf_checkpoint);
        str("out", &RunConfig::out_dir);
        str("schema", &RunConfig::schema);
        num_int("t_obs", &RunConfig::t_obs);
        num_int("t_pred", &RunConfig::t_pred);
        num_int("stride", &RunConfig::stride);
        num_dbl("dt", &RunConfig::dt);
        num_dbl("neighbor_radius", &RunConfig::neighbor_radius);
        num_dbl("neighbor_lateral", &RunConfig::neighbor_lateral);
        num_int("neighbor_max", &RunConfig::neighbor_max);
        num_int("gen_lane_count", &RunConfig::gen_lane_count);
        num_dbl("gen_lane_width", &RunConfig::gen_lane_width);
        num_dbl("gen_duration", &RunConfig::gen_duration);
        num_int("gen_vehicle_count", &RunConfig::gen_vehicle_count);
        num_dbl("gen_mix_straight", &RunConfig::gen_mix_straight);
        num_dbl("gen_mix_left", &RunConfig::gen_mix_left);
        num_dbl("gen_mix_right", &RunConfig::gen_mix_right);
        num_dbl("gen_speed_min", &RunConfig::gen_speed_min);
        num_dbl("gen_speed_max", &RunConfig::gen_speed_max);
        num_int("modes_count", &RunConfig::modes_count);
        str("modes_basis", &RunConfig::modes_basis);
        num_int("goal_d_model", &RunConfig::goal_d_model);
        num_int("goal_heads", &RunConfig::goal_heads);
        num_int("goal_blocks", &RunConfig::goal_blocks);
        num_int("goal_ffn", &RunConfig::goal_ffn);
        num_int("goal_head_hidden", &RunConfig::goal_head_hidden);
        num_dbl("goal_lambda", &RunConfig::goal_lambda);
        num_dbl("goal_rate", &RunConfig::goal_rate);
        num_int("goal_epochs", &RunConfig::goal_epochs);
        num_int("goal_batch", &RunConfig::goal_batch);
        num_dbl("nsf_r_col", &RunConfig::nsf_r_col);
        num_dbl("nsf_a", &RunConfig::nsf_a);
        num_dbl("nsf_eps_line", &RunConfig::nsf_eps_line);
        num_dbl("nsf_tau_min", &RunConfig::nsf_tau_min);
        num_int("nsf_history", &RunConfig::nsf_history);
        num_int("nsf_embed", &RunConfig::nsf_embed);
        num_int("nsf_lstm_hidden", &RunConfig::nsf_lstm_hidden);
        num_int("nsf_mlp_hidden", &RunConfig::nsf_mlp_hidden);
        num_dbl("nsf_rate", &RunConfig::nsf_rate);
        num_int("nsf_epochs_phase1", &RunConfig::nsf_epochs_phase1);
        num_int("nsf_epochs_phase2", &RunConfig::nsf_epochs_phase2);
        num_int("nsf_batch", &RunConfig::nsf_batch);
        boolean("nsf_joint_phase2", &RunConfig::nsf_joint_phase2);
        boolean("nsf_oracle_goals", &RunConfig::nsf_oracle_goals);
        num_int("eval_k", &RunConfig::eval_k);
        num_dbl("eval_split", &RunConfig::eval_split);
        str("plot_kind", &RunConfig::plot_kind);
        num_int("plot_window", &RunConfig::plot_window);
        num_int("plot_step", &RunConfig::plot_step);
        f["seed"] = {[](RunConfig& c, const std::string& v) {
                         c.seed = parse_num<unsigned long long>(v, "seed");
                     },
                     [](const RunConfig& c) { return std::to_string(c.seed); }};
        return f;
    }();
    return table;
}

}  // namespace

std::map<std::string, std::string> parse_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

RunConfig RunConfig::from_map(const std::map<std::string, std::string>& kv) {
    RunConfig cfg;
    std::vector<std::string> errors;
    for (const auto& [key, value] : kv) {
        auto it = fields().find(key);
        if (it == fields().end()) {
            errors.push_back("unknown key '" + key + "'");
            continue;
        }
        try {
            it->second.set(cfg, value);
        } catch (const ConfigError& e) {
            errors.push_back(e.what());
        }
    }
    if (!errors.empty()) {
        std::string msg = "configuration errors:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    return from_map(parse_key_value_file(path));
}

std::string RunConfig::canonical_dump() const {
    std::ostringstream os;
    for (const auto& [key, field] : fields()) os << key << "=" << field.get(*this) << "\n";
    return os.str();
}

void RunConfig::validate() const {
    std::vector<std::string> errors;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    };
    check(t_obs >= 2, "t_obs must be >= 2");
    check(t_pred >= 1, "t_pred must be >= 1");
    check(stride >= 1, "stride must be >= 1");
    check(dt > 0, "dt must be positive");
    check(neighbor_radius > 0, "neighbor_radius must be positive");
    check(neighbor_lateral > 0, "neighbor_lateral must be positive");
    check(neighbor_max >= 1, "neighbor_max must be >= 1");
    check(gen_lane_count >= 2, "gen_lane_count must be >= 2");
    check(gen_lane_width > 0, "gen_lane_width must be positive");
    check(gen_duration > 0, "gen_duration must be positive");
    check(gen_vehicle_count >= 1, "gen_vehicle_count must be >= 1");
    check(std::abs(gen_mix_straight + gen_mix_left + gen_mix_right - 1.0) <= 1e-9,
          "gen_mix fractions must sum to 1");
    check(gen_mix_straight >= 0 && gen_mix_left >= 0 && gen_mix_right >= 0,
          "gen_mix fractions must be non-negative");
    check(gen_speed_min > 0 && gen_speed_max >= gen_speed_min,
          "gen_speed range must be positive and ordered");
    check(modes_count >= 1, "modes_count must be >= 1");
    check(modes_basis == "endpoint" || modes_basis == "full",
          "modes_basis must be endpoint or full");
    check(schema == "canonical" || schema == "ngsim" || schema == "highd",
          "schema must be canonical, ngsim or highd");
    check(goal_d_model >= 1 && goal_d_model % std::max(1, goal_heads) == 0,
          "goal_d_model must be divisible by goal_heads");
    check(goal_heads >= 1, "goal_heads must be >= 1");
    check(goal_blocks >= 1, "goal_blocks must be >= 1");
    check(goal_ffn >= 1, "goal_ffn must be >= 1");
    check(goal_rate > 0, "goal_rate must be positive");
    check(goal_epochs >= 1, "goal_epochs must be >= 1");
    check(goal_batch >= 1, "goal_batch must be >= 1");
    check(goal_lambda >= 0, "goal_lambda must be non-negative");
    check(nsf_r_col > 0, "nsf_r_col must be positive");
    check(nsf_a > 0, "nsf_a must be positive");
    check(nsf_eps_line > 0, "nsf_eps_line must be positive");
    check(nsf_tau_min > 0, "nsf_tau_min must be positive");
    check(nsf_history >= 1, "nsf_history must be >= 1");
    check(nsf_rate > 0, "nsf_rate must be positive");
    check(nsf_epochs_phase1 >= 0, "nsf_epochs_phase1 must be >= 0");
    check(nsf_epochs_phase2 >= 0, "nsf_epochs_phase2 must be >= 0");
    check(nsf_batch >= 1, "nsf_batch must be >= 1");
    check(eval_k >= 1, "eval_k must be >= 1");
    check(eval_k <= modes_count, "eval_k must be <= modes_count");
    check(eval_split > 0 && eval_split < 1, "eval_split must be in (0,1)");
    check(plot_kind == "modes" || plot_kind == "multimodal" || plot_kind == "forces",
          "plot_kind must be one of: modes, multimodal, forces");
    if (!errors.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
}

}  // namespace gnp::cli
