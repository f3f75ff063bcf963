#include "gnp/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace gnp::synth {

namespace {

constexpr int kGroupSize = 3;
constexpr double kInGroupSpacing = 15.0;   // meters, > 10 m gap + wobble margin
constexpr double kLateralWobbleAmp = 0.1;  // meters, total
constexpr double kLongWobbleAmp = 0.5;     // meters, total displacement

// smooth step with zero first and second derivative at both ends
double quintic(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }

struct Wobble {
    struct Term {
        double amp, omega, phase;
    };
    std::vector<Term> terms;

    double at(double t) const {
        double v = 0.0;
        for (const auto& w : terms) v += w.amp * std::sin(w.omega * t + w.phase);
        return v;
    }
};

Wobble make_wobble(std::mt19937_64& rng, double total_amp) {
    std::uniform_int_distribution<int> count_dist(2, 3);
    std::uniform_real_distribution<double> period_dist(3.0, 8.0);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * M_PI);
    const int n = count_dist(rng);
    Wobble w;
    for (int i = 0; i < n; ++i) {
        Wobble::Term term;
        term.amp = total_amp / n;
        term.omega = 2.0 * M_PI / period_dist(rng);
        term.phase = phase_dist(rng);
        w.terms.push_back(term);
    }
    return w;
}

int nearest_lane_index(double y, int lane_count, double lane_width) {
    int idx = static_cast<int>(std::floor(y / lane_width));
    return std::clamp(idx, 0, lane_count - 1);
}

}  // namespace

void ScenarioSpec::validate() const {
    std::vector<std::string> errs;
    double mix_sum = maneuver_mix[0] + maneuver_mix[1] + maneuver_mix[2];
    if (maneuver_mix[0] < 0 || maneuver_mix[1] < 0 || maneuver_mix[2] < 0)
        errs.push_back("maneuver_mix fractions must be non-negative");
    if (std::abs(mix_sum - 1.0) > 1e-9) errs.push_back("maneuver_mix must sum to 1");
    if (lane_count < 2) errs.push_back("lane_count must be >= 2");
    if (dt <= 0) errs.push_back("dt must be positive");
    if (duration < 2 * dt) errs.push_back("duration must cover at least two frames");
    if (lane_width <= 0) errs.push_back("lane_width must be positive");
    if (vehicle_count < 1) errs.push_back("vehicle_count must be >= 1");
    if (speed_range[0] <= 0 || speed_range[1] < speed_range[0])
        errs.push_back("speed_range must be positive and ordered");
    if (speed_range[1] >= 100.0) errs.push_back("speeds must stay below 100 m/s");
    if (!errs.empty()) {
        std::string msg = "invalid scenario spec:";
        for (const auto& e : errs) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
}

const char* maneuver_name(Maneuver m) {
    switch (m) {
        case Maneuver::Straight: return "straight";
        case Maneuver::Left: return "left";
        case Maneuver::Right: return "right";
    }
    return "straight";
}

Maneuver maneuver_from_name(const std::string& name) {
    if (name == "straight") return Maneuver::Straight;
    if (name == "left") return Maneuver::Left;
    if (name == "right") return Maneuver::Right;
    throw DataError("unknown maneuver label: " + name);
}

GeneratedScenario generate(const ScenarioSpec& spec) {
    spec.validate();

    const bool wants_changes = spec.maneuver_mix[1] > 0 || spec.maneuver_mix[2] > 0;
    if (wants_changes && spec.lane_count < 2)
        throw GenerationError("lane-change maneuvers need at least 2 lanes (constraint: lane_count)");
    if (wants_changes && spec.duration < 2.0)
        throw GenerationError("duration too short to fit a lane change (constraint: duration >= 2 s)");

    GeneratedScenario out;
    out.dataset.dt = spec.dt;

    // lane geometry: boundaries at the extremes, crossable center lines between lanes
    out.lanes.travel_direction = +1;
    out.lanes.lines.push_back({0.0, traj::LineKind::Boundary});
    for (int i = 1; i < spec.lane_count; ++i)
        out.lanes.lines.push_back({i * spec.lane_width, traj::LineKind::Center});
    out.lanes.lines.push_back({spec.lane_count * spec.lane_width, traj::LineKind::Boundary});
    out.lanes.validate();

    const int n_frames = static_cast<int>(std::llround(spec.duration / spec.dt)) + 1;

    // maneuver counts matching the mix, shuffled across vehicle indices
    const int n = spec.vehicle_count;
    int n_left = static_cast<int>(std::llround(spec.maneuver_mix[1] * n));
    int n_right = static_cast<int>(std::llround(spec.maneuver_mix[2] * n));
    if (n_left + n_right > n) n_right = n - n_left;
    std::vector<Maneuver> maneuvers(static_cast<std::size_t>(n), Maneuver::Straight);
    for (int i = 0; i < n_left; ++i) maneuvers[static_cast<std::size_t>(i)] = Maneuver::Left;
    for (int i = 0; i < n_right; ++i) maneuvers[static_cast<std::size_t>(n_left + i)] = Maneuver::Right;
    {
        std::mt19937_64 rng(derive_seed(spec.seed, 0xa55));
        std::shuffle(maneuvers.begin(), maneuvers.end(), rng);
    }

    // groups separated far enough that inter-group speed differences can
    // never close the 10 m gap within the scenario duration
    const double group_span = (kGroupSize - 1) * kInGroupSpacing;
    const double group_spacing =
        group_span + 10.0 + (spec.speed_range[1] - spec.speed_range[0]) * spec.duration + 50.0;
    const int n_groups = (n + kGroupSize - 1) / kGroupSize;

    std::vector<double> group_speed(static_cast<std::size_t>(n_groups));
    for (int g = 0; g < n_groups; ++g) {
        std::mt19937_64 rng(derive_seed(spec.seed, 0x1000000ULL + static_cast<std::uint64_t>(g)));
        std::uniform_real_distribution<double> speed_dist(spec.speed_range[0], spec.speed_range[1]);
        group_speed[static_cast<std::size_t>(g)] = speed_dist(rng);
    }

    for (int vi = 0; vi < n; ++vi) {
        std::mt19937_64 rng(derive_seed(spec.seed, static_cast<std::uint64_t>(vi)));
        const int g = vi / kGroupSize;
        const int member = vi % kGroupSize;
        const Maneuver mv = maneuvers[static_cast<std::size_t>(vi)];

        // lane compatible with the maneuver
        int lane;
        if (mv == Maneuver::Left) {
            std::uniform_int_distribution<int> lane_dist(0, spec.lane_count - 2);
            lane = lane_dist(rng);
        } else if (mv == Maneuver::Right) {
            std::uniform_int_distribution<int> lane_dist(1, spec.lane_count - 1);
            lane = lane_dist(rng);
        } else {
            std::uniform_int_distribution<int> lane_dist(0, spec.lane_count - 1);
            lane = lane_dist(rng);
        }
        const double y_start = (lane + 0.5) * spec.lane_width;
        const double y_delta = (mv == Maneuver::Left) ? spec.lane_width
                             : (mv == Maneuver::Right) ? -spec.lane_width
                                                       : 0.0;

        double change_start = 0.0, change_dur = 0.0;
        if (mv != Maneuver::Straight) {
            std::uniform_real_distribution<double> dur_dist(4.0, 6.0);
            change_dur = std::min(dur_dist(rng), spec.duration - 1.0);
            change_dur = std::max(change_dur, 1.0);
            const double latest = std::max(0.5, spec.duration - change_dur - 0.5);
            std::uniform_real_distribution<double> start_dist(0.5, latest);
            change_start = start_dist(rng);
        }

        const double base_speed = group_speed[static_cast<std::size_t>(g)];
        const double x0 = g * group_spacing - member * kInGroupSpacing;
        Wobble long_wobble = make_wobble(rng, kLongWobbleAmp);
        Wobble lat_wobble = make_wobble(rng, kLateralWobbleAmp);

        traj::VehicleTrack track;
        track.vehicle_id = vi + 1;
        track.start_frame = 0;
        std::vector<Vec2> positions;
        positions.reserve(static_cast<std::size_t>(n_frames));
        for (int f = 0; f < n_frames; ++f) {
            const double t = f * spec.dt;
            double y = y_start + lat_wobble.at(t);
            if (mv != Maneuver::Straight) {
                const double u = std::clamp((t - change_start) / change_dur, 0.0, 1.0);
                y += y_delta * quintic(u);
            }
            const double x = x0 + base_speed * t + long_wobble.at(t);
            positions.emplace_back(x, y);
        }
        auto velocities = traj::derive_velocities(positions, spec.dt);
        for (int f = 0; f < n_frames; ++f) {
            traj::VehicleState st;
            st.position = positions[static_cast<std::size_t>(f)];
            st.velocity = velocities[static_cast<std::size_t>(f)];
            track.states.push_back(st);
            track.lane_ids.push_back(
                nearest_lane_index(st.position.y(), spec.lane_count, spec.lane_width));
        }
        out.dataset.tracks.push_back(std::move(track));
        out.labels.emplace_back(vi + 1, mv);
    }

    std::string violation = check_same_lane_gaps(out.dataset, out.lanes, 10.0);
    if (!violation.empty()) throw GenerationError("cannot satisfy 10 m same-lane gap: " + violation);

    return out;
}

std::string check_same_lane_gaps(const traj::Dataset& ds, const traj::LaneGeometry& lanes, double min_gap) {
    const double width = lanes.lane_width();
    const double y0 = lanes.lines.front().offset;
    long max_frames = 0;
    for (const auto& t : ds.tracks)
        max_frames = std::max(max_frames, t.start_frame + static_cast<long>(t.states.size()));

    for (long f = 0; f < max_frames; ++f) {
        std::map<int, std::vector<std::pair<double, long>>> per_lane;
        for (const auto& t : ds.tracks) {
            const long rel = f - t.start_frame;
            if (rel < 0 || rel >= static_cast<long>(t.states.size())) continue;
            const auto& p = t.states[static_cast<std::size_t>(rel)].position;
            const int lane = static_cast<int>(std::floor((p.y() - y0) / width));
            per_lane[lane].emplace_back(p.x(), t.vehicle_id);
        }
        for (auto& [lane, xs] : per_lane) {
            std::sort(xs.begin(), xs.end());
            for (std::size_t i = 1; i < xs.size(); ++i) {
                if (xs[i].first - xs[i - 1].first < min_gap) {
                    std::ostringstream msg;
                    msg << "vehicles " << xs[i - 1].second << " and " << xs[i].second << " at frame " << f
                        << " in lane " << lane << " (gap " << xs[i].first - xs[i - 1].first << " m)";
                    return msg.str();
                }
            }
        }
    }
    return "";
}

void write_labels_csv(const std::vector<std::pair<long, Maneuver>>& labels, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "vehicle_id,maneuver\n";
    for (const auto& [id, mv] : labels) out << id << ',' << maneuver_name(mv) << '\n';
}

std::vector<std::pair<long, Maneuver>> load_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open labels file: " + path);
    std::vector<std::pair<long, Maneuver>> labels;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) throw DataError("malformed labels row: " + line);
        std::string tail = line.substr(comma + 1);
        while (!tail.empty() && (tail.back() == '\r' || tail.back() == '\n')) tail.pop_back();
        labels.emplace_back(std::stol(line.substr(0, comma)), maneuver_from_name(tail));
    }
    return labels;
}

}  // namespace gnp::synth
