#include "gnp/modes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace gnp::modes {

namespace {

Eigen::VectorXd flatten(const Trajectory& t) {
    Eigen::VectorXd v(t.rows() * 2);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
        v(2 * i) = t(i, 0);
        v(2 * i + 1) = t(i, 1);
    }
    return v;
}

Eigen::VectorXd softmax_neg_sqdist(const Eigen::VectorXd& sqdist) {
    Eigen::VectorXd z = -sqdist;
    const double zmax = z.maxCoeff();
    // distances are meters^2, so exponent gaps easily exceed the double
    // underflow range; floor keeps every component strictly positive
    Eigen::VectorXd e = (z.array() - zmax).exp().max(1e-300);
    return e / e.sum();
}

}  // namespace

CompareBasis basis_from_name(const std::string& name) {
    if (name == "endpoint") return CompareBasis::Endpoint;
    if (name == "full") return CompareBasis::Full;
    throw ConfigError("unknown comparison basis: " + name + " (expected endpoint|full)");
}

const char* basis_name(CompareBasis b) { return b == CompareBasis::Endpoint ? "endpoint" : "full"; }

void IntentionModeSet::validate() const {
    if (L() < 2) throw DataError("mode set needs L >= 2");
    for (const auto& c : centers) {
        if (c.rows() != t_pred) throw DataError("mode center length != t_pred");
        if (!c.allFinite()) throw NumericsError("mode center has non-finite values");
    }
    for (int i = 0; i < L(); ++i) {
        for (int j = i + 1; j < L(); ++j) {
            double d = (flatten(centers[static_cast<std::size_t>(i)]) -
                        flatten(centers[static_cast<std::size_t>(j)]))
                           .norm();
            if (d <= 0.0) throw DataError("mode centers must be pairwise distinct");
        }
    }
}

IntentionModeSet fit_modes(const std::vector<Trajectory>& futures, int L, std::uint64_t seed,
                           const std::string& normalization_tag, FitInfo* info) {
    const int n = static_cast<int>(futures.size());
    if (L < 1) throw ConfigError("L must be >= 1");
    if (n < L)
        throw DataError("fit_modes: need at least L=" + std::to_string(L) + " samples, got " +
                        std::to_string(n));
    const int t_pred = static_cast<int>(futures.front().rows());
    for (const auto& f : futures)
        if (f.rows() != t_pred) throw DataError("fit_modes: all futures must share T_pred");

    const int dim = 2 * t_pred;
    Eigen::MatrixXd data(n, dim);
    for (int i = 0; i < n; ++i) data.row(i) = flatten(futures[static_cast<std::size_t>(i)]);

    // farthest-point seeding: random first center, then repeatedly the sample
    // farthest from its nearest chosen center (ties break low)
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> first_dist(0, n - 1);
    std::vector<int> seed_idx{first_dist(rng)};
    Eigen::VectorXd nearest_sq = (data.rowwise() - data.row(seed_idx[0])).rowwise().squaredNorm();
    while (static_cast<int>(seed_idx.size()) < L) {
        int best = 0;
        double best_d = -1.0;
        for (int i = 0; i < n; ++i) {
            if (nearest_sq(i) > best_d) {
                best_d = nearest_sq(i);
                best = i;
            }
        }
        seed_idx.push_back(best);
        Eigen::VectorXd d = (data.rowwise() - data.row(best)).rowwise().squaredNorm();
        nearest_sq = nearest_sq.cwiseMin(d);
    }

    Eigen::MatrixXd centers(L, dim);
    for (int l = 0; l < L; ++l) centers.row(l) = data.row(seed_idx[static_cast<std::size_t>(l)]);

    std::vector<int> assign(static_cast<std::size_t>(n), -1);
    FitInfo fit;
    const int max_iter = 200;
    for (int iter = 0; iter < max_iter; ++iter) {
        ++fit.iterations;
        bool changed = false;
        double inertia = 0.0;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int l = 0; l < L; ++l) {
                double d = (data.row(i) - centers.row(l)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = l;
                }
            }
            if (assign[static_cast<std::size_t>(i)] != best) {
                assign[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
            inertia += best_d;
        }
        fit.inertia = inertia;
        fit.inertia_history.push_back(inertia);
        if (!changed) {
            fit.converged = true;
            break;
        }

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(L, dim);
        std::vector<int> counts(static_cast<std::size_t>(L), 0);
        for (int i = 0; i < n; ++i) {
            sums.row(assign[static_cast<std::size_t>(i)]) += data.row(i);
            ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
        }
        for (int l = 0; l < L; ++l) {
            if (counts[static_cast<std::size_t>(l)] > 0) {
                centers.row(l) = sums.row(l) / counts[static_cast<std::size_t>(l)];
            } else {
                // deterministic re-seed: the sample farthest from its own center
                int far_i = 0;
                double far_d = -1.0;
                for (int i = 0; i < n; ++i) {
                    double d = (data.row(i) - centers.row(assign[static_cast<std::size_t>(i)])).squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        far_i = i;
                    }
                }
                centers.row(l) = data.row(far_i);
                ++fit.reseeds;
            }
        }
    }

    // order centers by decreasing cluster population, ties by original index
    std::vector<int> counts(static_cast<std::size_t>(L), 0);
    for (int a : assign) ++counts[static_cast<std::size_t>(a)];
    std::vector<int> order(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) order[static_cast<std::size_t>(l)] = l;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return counts[static_cast<std::size_t>(a)] > counts[static_cast<std::size_t>(b)];
    });

    IntentionModeSet set;
    set.t_pred = t_pred;
    set.normalization_tag = normalization_tag;
    for (int k = 0; k < L; ++k) {
        const int l = order[static_cast<std::size_t>(k)];
        Trajectory c(t_pred, 2);
        for (int i = 0; i < t_pred; ++i) {
            c(i, 0) = centers(l, 2 * i);
            c(i, 1) = centers(l, 2 * i + 1);
        }
        set.centers.push_back(std::move(c));
    }
    if (info) *info = fit;
    return set;
}

namespace {

Eigen::VectorXd squared_distances_endpoint(const Vec2& goal, const IntentionModeSet& modes) {
    Eigen::VectorXd d(modes.L());
    for (int l = 0; l < modes.L(); ++l) d(l) = (goal - modes.endpoint(l)).squaredNorm();
    return d;
}

Eigen::VectorXd squared_distances_full(const Trajectory& future, const IntentionModeSet& modes) {
    Eigen::VectorXd d(modes.L());
    for (int l = 0; l < modes.L(); ++l)
        d(l) = (future - modes.centers[static_cast<std::size_t>(l)]).squaredNorm();
    return d;
}

int argmin_tie_low(const Eigen::VectorXd& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i)
        if (v(i) < v(best)) best = i;
    return best;
}

}  // namespace

int nearest_mode(const Vec2& goal, const IntentionModeSet& modes) {
    return argmin_tie_low(squared_distances_endpoint(goal, modes));
}

int nearest_mode(const Trajectory& future, const IntentionModeSet& modes) {
    return argmin_tie_low(squared_distances_full(future, modes));
}

int nearest_mode_basis(const Trajectory& future, const IntentionModeSet& modes, CompareBasis basis) {
    if (basis == CompareBasis::Endpoint) return nearest_mode(Vec2(future.row(future.rows() - 1)), modes);
    return nearest_mode(future, modes);
}

Eigen::VectorXd soft_probabilities(const Vec2& goal, const IntentionModeSet& modes) {
    return softmax_neg_sqdist(squared_distances_endpoint(goal, modes));
}

Eigen::VectorXd soft_probabilities(const Trajectory& future, const IntentionModeSet& modes) {
    return softmax_neg_sqdist(squared_distances_full(future, modes));
}

Eigen::VectorXd soft_probabilities_basis(const Trajectory& future, const IntentionModeSet& modes,
                                         CompareBasis basis) {
    if (basis == CompareBasis::Endpoint)
        return soft_probabilities(Vec2(future.row(future.rows() - 1)), modes);
    return soft_probabilities(future, modes);
}

void IntentionModeSet::save(const std::string& csv_path, const std::string& meta_path) const {
    std::ofstream out(csv_path);
    if (!out) throw DataError("cannot open for writing: " + csv_path);
    out << "mode_index,frame,x,y\n";
    for (int l = 0; l < L(); ++l) {
        const auto& c = centers[static_cast<std::size_t>(l)];
        for (int i = 0; i < t_pred; ++i)
            out << l << ',' << i << ',' << fmt_fixed(c(i, 0), 9) << ',' << fmt_fixed(c(i, 1), 9) << '\n';
    }
    std::ofstream meta(meta_path);
    if (!meta) throw DataError("cannot open for writing: " + meta_path);
    meta << "L=" << L() << "\n"
         << "t_pred=" << t_pred << "\n"
         << "normalization_tag=" << normalization_tag << "\n";
}

IntentionModeSet IntentionModeSet::load(const std::string& csv_path, const std::string& meta_path) {
    IntentionModeSet set;
    int L = 0;
    {
        std::ifstream meta(meta_path);
        if (!meta) throw DataError("cannot open modes metadata: " + meta_path);
        std::string line;
        while (std::getline(meta, line)) {
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(0, eq);
            std::string val = line.substr(eq + 1);
            while (!val.empty() && (val.back() == '\r' || val.back() == '\n')) val.pop_back();
            if (key == "L")
                L = std::stoi(val);
            else if (key == "t_pred")
                set.t_pred = std::stoi(val);
            else if (key == "normalization_tag")
                set.normalization_tag = val;
        }
    }
    if (L < 1 || set.t_pred < 1) throw DataError("modes metadata incomplete: " + meta_path);
    set.centers.assign(static_cast<std::size_t>(L), Trajectory::Zero(set.t_pred, 2));

    std::ifstream in(csv_path);
    if (!in) throw DataError("cannot open modes file: " + csv_path);
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue;
        }
        std::stringstream ss(line);
        std::string f0, f1, f2, f3;
        if (!std::getline(ss, f0, ',') || !std::getline(ss, f1, ',') || !std::getline(ss, f2, ',') ||
            !std::getline(ss, f3, ','))
            throw DataError("modes file line " + std::to_string(line_no) + ": malformed row");
        int l = std::stoi(f0);
        int fr = std::stoi(f1);
        if (l < 0 || l >= L || fr < 0 || fr >= set.t_pred)
            throw DataError("modes file line " + std::to_string(line_no) + ": index out of range");
        set.centers[static_cast<std::size_t>(l)](fr, 0) = std::stod(f2);
        set.centers[static_cast<std::size_t>(l)](fr, 1) = std::stod(f3);
    }
    return set;
}

}  // namespace gnp::modes
