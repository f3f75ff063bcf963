#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gnp/cli.hpp"
#include "gnp/eval.hpp"
#include "gnp/forces.hpp"
#include "gnp/modes.hpp"
#include "gnp/synthgen.hpp"
#include "gnp/trajdata.hpp"

#include <sstream>

namespace py = pybind11;
using namespace gnp;

namespace {

std::vector<Vec2> to_points(const Eigen::MatrixX2d& m) {
    std::vector<Vec2> pts;
    for (Eigen::Index i = 0; i < m.rows(); ++i) pts.emplace_back(m(i, 0), m(i, 1));
    return pts;
}

traj::LineKind kind_from(const std::string& s) {
    if (s == "center") return traj::LineKind::Center;
    if (s == "boundary") return traj::LineKind::Boundary;
    throw DataError("unknown line kind: " + s);
}

}  // namespace

PYBIND11_MODULE(_gnp, m) {
    m.doc() = "two-stage goal-based vehicle trajectory predictor (C++ core)";
    m.attr("__version__") = cli::version_string();

    // metrics
    m.def("ade", [](const Eigen::MatrixX2d& truth, const Eigen::MatrixX2d& pred) {
        return eval::ade(to_points(truth), to_points(pred));
    }, py::arg("truth"), py::arg("pred"), "mean per-step euclidean displacement");
    m.def("fde", [](const Eigen::MatrixX2d& truth, const Eigen::MatrixX2d& pred) {
        return eval::fde(to_points(truth), to_points(pred));
    }, py::arg("truth"), py::arg("pred"));
    m.def("rmse", [](const Eigen::MatrixX2d& truth, const Eigen::MatrixX2d& pred) {
        return eval::rmse(to_points(truth), to_points(pred));
    }, py::arg("truth"), py::arg("pred"));

    // force layer
    m.def("desired_velocity", [](const Vec2& p, const Vec2& goal, int t, int t_final, double dt) {
        auto dv = nsf::desired_velocity(p, goal, t, t_final, dt);
        return py::make_tuple(dv.v0, dv.direction, dv.v_des);
    }, py::arg("position"), py::arg("goal"), py::arg("t"), py::arg("t_final"), py::arg("dt"));
    m.def("goal_force", &nsf::goal_force, py::arg("velocity"), py::arg("v_des"), py::arg("tau"));
    m.def("vehicle_potential", &nsf::vehicle_potential, py::arg("r"), py::arg("k"), py::arg("r_col"));
    m.def("line_potential", [](double d, const std::string& kind, double k, double eps_line) {
        return nsf::line_potential(d, kind_from(kind), k, eps_line);
    }, py::arg("distance"), py::arg("kind"), py::arg("k"), py::arg("eps_line") = nsf::kEpsLine);
    m.def("repulsion_force",
          [](const Vec2& position, const std::vector<Vec2>& neighbors,
             const std::vector<std::pair<double, std::string>>& lines,
             const std::vector<double>& k_vehicles, const std::vector<double>& k_lines,
             double r_col) {
              std::vector<std::pair<long, Vec2>> nb;
              for (std::size_t i = 0; i < neighbors.size(); ++i)
                  nb.emplace_back(static_cast<long>(i), neighbors[i]);
              traj::LaneGeometry lanes;
              for (const auto& [offset, kind] : lines) lanes.lines.push_back({offset, kind_from(kind)});
              auto b = nsf::repulsion_force(position, nb, lanes, k_vehicles, k_lines, r_col);
              return b.total;
          },
          py::arg("position"), py::arg("neighbors"), py::arg("lines"), py::arg("k_vehicles"),
          py::arg("k_lines"), py::arg("r_col"));

    // intention modes
    m.def("fit_modes",
          [](const std::vector<Eigen::MatrixX2d>& futures, int L, std::uint64_t seed) {
              auto set = modes::fit_modes(futures, L, seed);
              std::vector<Eigen::MatrixX2d> centers(set.centers.begin(), set.centers.end());
              return centers;
          },
          py::arg("futures"), py::arg("L"), py::arg("seed") = 42);
    m.def("nearest_mode",
          [](const Vec2& goal, const std::vector<Eigen::MatrixX2d>& centers) {
              modes::IntentionModeSet set;
              set.centers = centers;
              set.t_pred = static_cast<int>(centers.at(0).rows());
              return modes::nearest_mode(goal, set);
          },
          py::arg("goal"), py::arg("centers"));
    m.def("soft_probabilities",
          [](const Vec2& goal, const std::vector<Eigen::MatrixX2d>& centers) {
              modes::IntentionModeSet set;
              set.centers = centers;
              set.t_pred = static_cast<int>(centers.at(0).rows());
              return Eigen::VectorXd(modes::soft_probabilities(goal, set));
          },
          py::arg("goal"), py::arg("centers"));

    // synthetic scenarios
    m.def("generate_scenario",
          [](int lane_count, double lane_width, double duration, double dt, int vehicle_count,
             std::tuple<double, double, double> mix, std::pair<double, double> speed_range,
             std::uint64_t seed, const std::string& dataset_csv, const std::string& labels_csv,
             const std::string& lanes_csv) {
              synth::ScenarioSpec spec;
              spec.lane_count = lane_count;
              spec.lane_width = lane_width;
              spec.duration = duration;
              spec.dt = dt;
              spec.vehicle_count = vehicle_count;
              spec.maneuver_mix = {std::get<0>(mix), std::get<1>(mix), std::get<2>(mix)};
              spec.speed_range = {speed_range.first, speed_range.second};
              spec.seed = seed;
              auto scn = synth::generate(spec);
              traj::write_canonical_csv(scn.dataset, dataset_csv);
              synth::write_labels_csv(scn.labels, labels_csv);
              scn.lanes.save(lanes_csv);
              return static_cast<int>(scn.dataset.tracks.size());
          },
          py::arg("lane_count"), py::arg("lane_width"), py::arg("duration"), py::arg("dt"),
          py::arg("vehicle_count"), py::arg("maneuver_mix"), py::arg("speed_range"), py::arg("seed"),
          py::arg("dataset_csv"), py::arg("labels_csv"), py::arg("lanes_csv"));

    // full pipeline passthrough: same surface as the gnp binary
    m.def("run_cli",
          [](const std::vector<std::string>& args) {
              std::ostringstream out, err;
              int code = cli::run(args, out, err);
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("args"), "run a gnp subcommand; returns (exit_code, stdout, stderr)");
}
