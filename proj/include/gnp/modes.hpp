#pragma once

#include "gnp/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gnp::modes {

/// Trajectory as a T x 2 matrix of positions in the normalized frame.
using Trajectory = Eigen::MatrixX2d;

enum class CompareBasis { Endpoint, Full };

CompareBasis basis_from_name(const std::string& name);
const char* basis_name(CompareBasis b);

struct FitInfo {
    int iterations = 0;
    bool converged = false;
    double inertia = 0.0;
    int reseeds = 0;
    std::vector<double> inertia_history;  // per iteration, non-increasing
};

/// L cluster-center future trajectories, ordered by decreasing cluster
/// population at fit time.
struct IntentionModeSet {
    std::vector<Trajectory> centers;
    int t_pred = 0;
    std::string normalization_tag;

    int L() const { return static_cast<int>(centers.size()); }
    Vec2 endpoint(int l) const { return centers[static_cast<std::size_t>(l)].row(t_pred - 1); }
    void validate() const;

    void save(const std::string& csv_path, const std::string& meta_path) const;
    static IntentionModeSet load(const std::string& csv_path, const std::string& meta_path);
};

/// Lloyd's algorithm on flattened 2*T_pred vectors with farthest-point
/// seeding; runs to assignment convergence or 200 iterations. Empty clusters
/// are re-seeded from the sample farthest from its assigned center.
IntentionModeSet fit_modes(const std::vector<Trajectory>& futures, int L, std::uint64_t seed,
                           const std::string& normalization_tag = "", FitInfo* info = nullptr);

/// Index of the center minimizing squared distance; ties break low.
int nearest_mode(const Vec2& goal, const IntentionModeSet& modes);
int nearest_mode(const Trajectory& future, const IntentionModeSet& modes);
int nearest_mode_basis(const Trajectory& future, const IntentionModeSet& modes, CompareBasis basis);

/// softmax over negative squared distances; sums to 1, argmax == nearest_mode.
Eigen::VectorXd soft_probabilities(const Vec2& goal, const IntentionModeSet& modes);
Eigen::VectorXd soft_probabilities(const Trajectory& future, const IntentionModeSet& modes);
Eigen::VectorXd soft_probabilities_basis(const Trajectory& future, const IntentionModeSet& modes,
                                         CompareBasis basis);

}  // namespace gnp::modes
