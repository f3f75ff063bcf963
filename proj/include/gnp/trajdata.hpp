#pragma once

#include "gnp/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gnp::traj {

/// Position + velocity of one vehicle at one frame.
struct VehicleState {
    Vec2 position{0.0, 0.0};  // meters; x longitudinal, y lateral
    Vec2 velocity{0.0, 0.0};  // meters/second
};

enum class LineKind { Center, Boundary };

struct LaneLine {
    double offset = 0.0;  // lateral offset, meters
    LineKind kind = LineKind::Center;
};

struct RigidTransform;

/// Straight-segment lane layout: lateral line offsets plus travel direction.
struct LaneGeometry {
    std::vector<LaneLine> lines;  // offsets strictly increasing
    int travel_direction = +1;    // +1 or -1 along x

    void validate() const;
    double lane_width() const;  // median spacing between adjacent lines
    LaneGeometry transformed(const RigidTransform& tf) const;

    static LaneGeometry load(const std::string& path);
    void save(const std::string& path) const;
};

/// Translation followed by an optional rotation by pi about the origin
/// (the west-to-east flip). p' = R(p + t), v' = R v.
struct RigidTransform {
    Vec2 translation{0.0, 0.0};
    bool flipped = false;

    double rotation() const;  // 0 or pi, radians

    Vec2 apply_point(const Vec2& p) const;
    Vec2 apply_vector(const Vec2& v) const;
    Vec2 invert_point(const Vec2& p) const;
    Vec2 invert_vector(const Vec2& v) const;
};

/// One neighbor slot. Slots beyond the actual neighbor count are zeroed
/// with present=false.
struct NeighborTrack {
    long id = -1;
    std::vector<VehicleState> observed;
    bool present = false;
};

/// One training/evaluation sample: observed segment, future segment,
/// neighbor tracks over the observed span, and the lane reference.
struct TrajectoryWindow {
    long vehicle_id = -1;
    std::vector<VehicleState> observed;       // length t_obs
    std::vector<VehicleState> future;         // length t_pred
    std::vector<NeighborTrack> neighbors;     // exactly n_max slots
    std::string lane_ref;
    double dt = 0.1;

    int t_obs() const { return static_cast<int>(observed.size()); }
    int t_pred() const { return static_cast<int>(future.size()); }
};

/// A contiguous run of frames for one vehicle. Vehicles with frame gaps
/// are split into multiple tracks.
struct VehicleTrack {
    long vehicle_id = -1;
    long start_frame = 0;
    std::vector<VehicleState> states;
    std::vector<int> lane_ids;  // per frame when the source had a lane column, else empty
};

struct Dataset {
    double dt = 0.1;
    std::vector<VehicleTrack> tracks;

    std::size_t total_frames() const;
};

enum class Schema { Canonical, NgsimLike, HighdLike };

/// Vehicles within this longitudinal range and within roughly one adjacent
/// lane laterally at the last observed frame, capped at the nearest max_count.
struct NeighborRule {
    double longitudinal_range = 50.0;  // meters
    double lateral_range = 5.55;       // meters, ~1.5 lanes
    int max_count = 8;
};

struct WindowReport {
    std::size_t windows_emitted = 0;
    std::size_t tracks_too_short = 0;
    std::size_t expected_from_lengths = 0;  // sum over tracks of per-track window count
};

/// Central finite differences with edge replication.
std::vector<Vec2> derive_velocities(const std::vector<Vec2>& positions, double dt);

/// Parse a trajectory file into per-vehicle frame runs, sorted by frame.
/// Velocities are derived by finite differences when the source lacks them.
Dataset load_trajectories(const std::string& path, Schema schema, double dt);

void write_canonical_csv(const Dataset& ds, const std::string& path);

std::vector<TrajectoryWindow> make_windows(const Dataset& ds, int t_obs, int t_pred, int stride,
                                           const NeighborRule& rule, WindowReport* report = nullptr);

/// Shift the first future point to the origin; flip westbound windows to
/// eastbound. Returns the normalized window and the transform applied.
std::pair<TrajectoryWindow, RigidTransform> normalize(const TrajectoryWindow& window);

/// Apply the inverse transform to a normalized window.
TrajectoryWindow denormalize(const TrajectoryWindow& window, const RigidTransform& tf);

struct LineDistance {
    int index = 0;
    double distance = 0.0;  // meters, non-negative
    LineKind kind = LineKind::Center;
};

std::vector<LineDistance> distances_to_lines(const Vec2& position, const LaneGeometry& lanes);

}  // namespace gnp::traj
