#pragma once

#include "gnp/trajdata.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gnp::synth {

/// Raised when a scenario cannot be generated under its constraints.
struct GenerationError : std::runtime_error {
    explicit GenerationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ScenarioSpec {
    int lane_count = 3;
    double lane_width = 3.7;       // meters
    double duration = 12.0;        // seconds
    double dt = 0.2;               // seconds per frame
    int vehicle_count = 100;
    std::array<double, 3> maneuver_mix{0.5, 0.25, 0.25};  // straight, left, right
    std::array<double, 2> speed_range{20.0, 30.0};        // m/s
    std::uint64_t seed = 42;

    void validate() const;
};

enum class Maneuver { Straight, Left, Right };

const char* maneuver_name(Maneuver m);
Maneuver maneuver_from_name(const std::string& name);

struct GeneratedScenario {
    traj::Dataset dataset;
    std::vector<std::pair<long, Maneuver>> labels;  // vehicle_id -> maneuver
    traj::LaneGeometry lanes;
};

/// Deterministic scenario synthesis. Lane changes follow a quintic lateral
/// profile between lane centers; longitudinal motion is a shared per-group
/// base speed plus a low-amplitude sinusoidal displacement perturbation.
/// Stored velocities are the central finite differences of the emitted
/// positions, matching the loader's derivation rule.
GeneratedScenario generate(const ScenarioSpec& spec);

void write_labels_csv(const std::vector<std::pair<long, Maneuver>>& labels, const std::string& path);
std::vector<std::pair<long, Maneuver>> load_labels_csv(const std::string& path);

/// Same-lane minimum-gap audit used as a post-generation guard,
/// exposed for tests. Returns a violation message or empty string.
std::string check_same_lane_gaps(const traj::Dataset& ds, const traj::LaneGeometry& lanes, double min_gap);

}  // namespace gnp::synth
