#include "gnp/forces.hpp"

#include <cmath>

namespace gnp::nsf {

DesiredVelocity desired_velocity(const Vec2& position, const Vec2& goal, int t, int t_final,
                                 double dt) {
    if (t >= t_final)
        throw NumericsError("desired_velocity: step index " + std::to_string(t) +
                            " is not before the final frame " + std::to_string(t_final));
    DesiredVelocity out;
    const Vec2 diff = goal - position;
    const double dist = diff.norm();
    const double remaining = (t_final - t) * dt;
    out.v0 = dist / remaining;
    if (dist > kEpsPos) {
        out.direction = diff / dist;
        out.v_des = out.v0 * out.direction;
    }
    return out;
}

Vec2 goal_force(const Vec2& velocity, const Vec2& v_des, double tau) {
    if (tau <= 0.0) throw NumericsError("goal_force: tau must be positive");
    return (v_des - velocity) / tau;
}

double vehicle_potential(const Vec2& r, double k, double r_col) {
    return r_col * k * std::exp(-r.norm() / r_col);
}

double line_potential(double distance, traj::LineKind kind, double k, double eps_line,
                      bool* clamped) {
    if (kind == traj::LineKind::Center) return k * std::exp(-distance * distance);
    double d = distance;
    if (d < eps_line) {
        d = eps_line;
        if (clamped) *clamped = true;
    }
    return k * 0.5 / (d * d);
}

Vec2 vehicle_repulsion(const Vec2& r, double k, double r_col, double eps_pos, bool* coincident) {
    const double dist = r.norm();
    if (dist < eps_pos) {
        if (coincident) *coincident = true;
        const double dir = r.y() < 0.0 ? -1.0 : 1.0;
        return Vec2(0.0, dir) * k * std::exp(-eps_pos / r_col);
    }
    return k * std::exp(-dist / r_col) * (r / dist);
}

double line_repulsion_y(double signed_distance, traj::LineKind kind, double k, double eps_line,
                        bool* clamped) {
    if (kind == traj::LineKind::Center)
        return 2.0 * k * signed_distance * std::exp(-signed_distance * signed_distance);
    double s = signed_distance;
    if (std::abs(s) < eps_line) {
        s = s < 0.0 ? -eps_line : eps_line;
        if (clamped) *clamped = true;
    }
    return k / (s * s * s);
}

RepulsionBreakdown repulsion_force(const Vec2& position,
                                   const std::vector<std::pair<long, Vec2>>& neighbor_positions,
                                   const traj::LaneGeometry& lanes,
                                   const std::vector<double>& k_vehicles,
                                   const std::vector<double>& k_lines, double r_col,
                                   double eps_line, double eps_pos) {
    if (k_vehicles.size() != neighbor_positions.size())
        throw ShapeError("repulsion_force: one k per neighbor required");
    if (k_lines.size() != lanes.lines.size())
        throw ShapeError("repulsion_force: one k per lane line required");

    RepulsionBreakdown out;
    for (std::size_t j = 0; j < neighbor_positions.size(); ++j) {
        bool coincident = false;
        const Vec2 f = vehicle_repulsion(position - neighbor_positions[j].second, k_vehicles[j],
                                         r_col, eps_pos, &coincident);
        if (coincident) ++out.coincident_events;
        out.vehicles.emplace_back(neighbor_positions[j].first, f);
        out.total += f;
    }
    for (std::size_t l = 0; l < lanes.lines.size(); ++l) {
        bool clamped = false;
        const double fy = line_repulsion_y(position.y() - lanes.lines[l].offset,
                                           lanes.lines[l].kind, k_lines[l], eps_line, &clamped);
        if (clamped) ++out.clamp_events;
        const Vec2 f(0.0, fy);
        out.lines.emplace_back(static_cast<int>(l), f);
        out.total += f;
    }
    return out;
}

double total_potential(const Vec2& position,
                       const std::vector<std::pair<long, Vec2>>& neighbor_positions,
                       const traj::LaneGeometry& lanes, const std::vector<double>& k_vehicles,
                       const std::vector<double>& k_lines, double r_col, double eps_line) {
    double u = 0.0;
    for (std::size_t j = 0; j < neighbor_positions.size(); ++j)
        u += vehicle_potential(position - neighbor_positions[j].second, k_vehicles[j], r_col);
    for (std::size_t l = 0; l < lanes.lines.size(); ++l)
        u += line_potential(std::abs(position.y() - lanes.lines[l].offset), lanes.lines[l].kind,
                            k_lines[l], eps_line);
    return u;
}

}  // namespace gnp::nsf
