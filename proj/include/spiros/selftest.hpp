#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "spiros/allocation.hpp"
#include "spiros/config.hpp"
#include "spiros/dynamics.hpp"
#include "spiros/frames.hpp"
#include "spiros/sim.hpp"

namespace spiros {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // worst-case figure, for the report line
};

namespace detail {

inline SurfaceJet random_jet(std::mt19937& rng) {
  std::uniform_real_distribution<double> grad(-3.0, 3.0);
  return jet_from_gradient(grad(rng), grad(rng));
}

inline CheckResult check_rotations(std::mt19937 rng, int n) {
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::Matrix3d r = rot_ypr({ang(rng), ang(rng), ang(rng)});
    const double defect =
        (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    worst = std::max({worst, defect, std::abs(r.determinant() - 1.0)});
  }
  return {"rotation orthonormality", worst < 1e-12,
          "max defect " + format_double(worst)};
}

inline CheckResult check_body_frame(std::mt19937 rng, int n) {
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const SurfaceJet jet = random_jet(rng);
    const BodyFrameBasis basis = body_frame(jet, ang(rng));
    const double defect = (basis.a.transpose() * basis.a -
                           Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    const double ncons =
        (basis.n_hat() - tangent_basis(jet).n_hat).cwiseAbs().maxCoeff();
    worst = std::max({worst, defect, ncons});
  }
  return {"body frame orthonormality and normal", worst < 1e-12,
          "max defect " + format_double(worst)};
}

inline CheckResult check_kinematic_map(std::mt19937 rng, int n) {
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  const RobotParams params = RobotParams::sphere(1.0, 0.5);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const SurfaceJet jet = random_jet(rng);
    const auto [l, ldag] = kinematic_map(jet, ang(rng), params);
    const double defect =
        (ldag * l - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff();
    worst = std::max(worst, defect);
  }
  return {"pseudo-inverse identity", worst < 1e-12,
          "max defect " + format_double(worst)};
}

inline CheckResult check_xi_transform(std::mt19937 rng, int n) {
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const SurfaceJet jet = random_jet(rng);
    const Eigen::Matrix3d m = xi_transform(jet, ang(rng));
    const double defect =
        (m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    worst = std::max(worst, defect);
  }
  return {"turn-angle transform isometry", worst < 1e-12,
          "max defect " + format_double(worst)};
}

inline CheckResult check_allocation(std::mt19937 rng, int n) {
  std::uniform_real_distribution<double> t(-5.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    TorqueCommand tau;
    tau.tau << t(rng), t(rng), t(rng);
    const ThrusterSet set = torques_to_thrusts(tau, 0.5);
    const TorqueCommand back = thrusts_to_torques(set, 0.5);
    worst = std::max(worst, (back.tau - tau.tau).cwiseAbs().maxCoeff());
    worst = std::max(worst, net_thruster_force(set).cwiseAbs().maxCoeff());
  }
  return {"thruster allocation round trip", worst < 1e-12,
          "max defect " + format_double(worst)};
}

inline CheckResult check_torque_round_trip(std::mt19937 rng, int n) {
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_real_distribution<double> w(-3.0, 3.0);
  const RobotParams params = RobotParams::sphere(1.0, 0.5);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const SurfaceJet jet = random_jet(rng);
    RobotState state;
    state.psi = ang(rng);
    state.orientation = rot_ypr({ang(rng), ang(rng), ang(rng)});
    const Eigen::Vector3d want(w(rng), w(rng), w(rng));
    const TorqueCommand tau = accel_to_torque(want, state, jet, params);
    const Eigen::Vector3d got = body_angular_accel(tau, state, jet, params);
    worst = std::max(worst, (got - want).cwiseAbs().maxCoeff());
  }
  return {"torque map round trip", worst < 1e-9,
          "max defect " + format_double(worst)};
}

inline CheckResult check_energy() {
  SimConfig config;
  config.terrain = std::make_shared<InclinedRamp>(10.0 * M_PI / 180.0);
  config.t_end = 5.0;
  config.initial_state.p0 << 0.0, 0.0, 0.0;
  const SimTrace trace = run(config);
  if (trace.error) return {"free-roll energy conservation", false, trace.error_message};
  const double scale = config.params.mass * config.params.gravity *
                       config.params.radius;
  double worst = 0.0;
  for (const TraceRow& r : trace.rows)
    worst = std::max(worst, std::abs(r.energy - trace.rows.front().energy));
  return {"free-roll energy conservation", worst / scale < 1e-4,
          "max relative drift " + format_double(worst / scale)};
}

inline CheckResult check_config_round_trip() {
  const SimConfig config = scenario_ramp({0.0, 0.0, 0.0});
  const std::string text = dump_sim_config(config);
  std::istringstream in(text);
  const SimConfig re = load_sim_config(in);
  const bool same = dump_sim_config(re) == text;
  return {"config dump round trip", same,
          same ? "dump stable" : "dump changed after reload"};
}

}  // namespace detail

/// Runs the randomized invariant suites; seed pins the sample set.
inline std::vector<CheckResult> run_self_tests(unsigned seed = 42,
                                               int samples = 2000) {
  std::vector<CheckResult> results;
  results.push_back(detail::check_rotations(std::mt19937(seed), samples));
  results.push_back(detail::check_body_frame(std::mt19937(seed + 1), samples));
  results.push_back(detail::check_kinematic_map(std::mt19937(seed + 2), samples));
  results.push_back(detail::check_xi_transform(std::mt19937(seed + 3), samples));
  results.push_back(detail::check_allocation(std::mt19937(seed + 4), samples));
  results.push_back(
      detail::check_torque_round_trip(std::mt19937(seed + 5), samples));
  results.push_back(detail::check_energy());
  results.push_back(detail::check_config_round_trip());
  return results;
}

}  // namespace spiros
