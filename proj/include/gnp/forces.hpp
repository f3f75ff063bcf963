#pragma once

#include "gnp/trajdata.hpp"

#include <utility>
#include <vector>

namespace gnp::nsf {

constexpr double kEpsPos = 1e-6;    // meters; coincident-vehicle guard
constexpr double kEpsLine = 0.1;    // meters; boundary-line clamp

struct DesiredVelocity {
    double v0 = 0.0;    // m/s
    Vec2 direction{0.0, 0.0};  // unit vector, zero when degenerate
    Vec2 v_des{0.0, 0.0};
};

/// Goal-directed desired velocity, re-derived every step from the remaining
/// distance and time: v0 = |goal - p| / ((T - t) dt).
DesiredVelocity desired_velocity(const Vec2& position, const Vec2& goal, int t, int t_final,
                                 double dt);

/// Relaxation of the current velocity toward v_des within time tau.
Vec2 goal_force(const Vec2& velocity, const Vec2& v_des, double tau);

/// r_col * k * exp(-|r| / r_col); strictly decreasing in |r|.
double vehicle_potential(const Vec2& r, double k, double r_col);

/// Center lines: k * exp(-d^2). Boundary lines: 0.5 k / d^2 with d clamped
/// to eps_line (clamp reported through the flag).
double line_potential(double distance, traj::LineKind kind, double k, double eps_line = kEpsLine,
                      bool* clamped = nullptr);

/// Force on the target from one neighbor: k exp(-|r|/r_col) r/|r|, pointing
/// from neighbor toward target. Coincident vehicles fall back to the lateral
/// unit vector away from the neighbor.
Vec2 vehicle_repulsion(const Vec2& r, double k, double r_col, double eps_pos = kEpsPos,
                       bool* coincident = nullptr);

/// Lateral force component from one line given the signed distance
/// (position_y - line_offset). Sign pushes away from the line.
double line_repulsion_y(double signed_distance, traj::LineKind kind, double k,
                        double eps_line = kEpsLine, bool* clamped = nullptr);

struct RepulsionBreakdown {
    Vec2 total{0.0, 0.0};
    std::vector<std::pair<long, Vec2>> vehicles;  // neighbor id -> force
    std::vector<std::pair<int, Vec2>> lines;      // line index -> force
    int clamp_events = 0;
    int coincident_events = 0;
};

/// Analytic negative gradient of the total potential over all neighbors and
/// lane lines; per-source terms are recorded so they can be audited against
/// the summed total.
RepulsionBreakdown repulsion_force(const Vec2& position,
                                   const std::vector<std::pair<long, Vec2>>& neighbor_positions,
                                   const traj::LaneGeometry& lanes,
                                   const std::vector<double>& k_vehicles,
                                   const std::vector<double>& k_lines, double r_col,
                                   double eps_line = kEpsLine, double eps_pos = kEpsPos);

/// Total repulsive potential at a position; the finite-difference oracle for
/// repulsion_force differentiates this.
double total_potential(const Vec2& position,
                       const std::vector<std::pair<long, Vec2>>& neighbor_positions,
                       const traj::LaneGeometry& lanes, const std::vector<double>& k_vehicles,
                       const std::vector<double>& k_lines, double r_col,
                       double eps_line = kEpsLine);

}  // namespace gnp::nsf
