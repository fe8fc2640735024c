#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spiros/dynamics.hpp"

namespace spiros {

/// Pair thrust magnitudes for the octahedral six-thruster arrangement.
/// Each value is shared by a diametrically opposite thruster pair, so the
/// net force is zero by construction.
struct ThrusterSet {
  Eigen::Vector3d f = Eigen::Vector3d::Zero();  // F_X, F_Y, F_Z pairs, N
  double f_max = std::numeric_limits<double>::infinity();
  bool saturated = false;
};

/// One physical thruster: mounting position and thrust direction in the
/// robot frame, with the pair index its magnitude is drawn from.
struct ThrusterGeometry {
  Eigen::Vector3d position;   // units of lever arm l
  Eigen::Vector3d direction;  // unit thrust direction (sign included)
  int pair;                   // 0 -> F_X, 1 -> F_Y, 2 -> F_Z
};

/// The six-thruster table: positions +-l on each axis, thrust along the
/// axis completing the couple.
inline const std::array<ThrusterGeometry, 6>& thruster_table() {
  static const std::array<ThrusterGeometry, 6> table = {{
      {{0, 1, 0}, {0, 0, 1}, 0},
      {{0, -1, 0}, {0, 0, -1}, 0},
      {{0, 0, 1}, {1, 0, 0}, 1},
      {{0, 0, -1}, {-1, 0, 0}, 1},
      {{1, 0, 0}, {0, 1, 0}, 2},
      {{-1, 0, 0}, {0, -1, 0}, 2},
  }};
  return table;
}

/// Each pair contributes 2 l F about its axis; values beyond f_max are
/// clamped and flagged.
inline ThrusterSet torques_to_thrusts(
    const TorqueCommand& tau, double l,
    double f_max = std::numeric_limits<double>::infinity()) {
  if (!(l > 0.0)) throw std::invalid_argument("torques_to_thrusts: l must be > 0");
  ThrusterSet set;
  set.f_max = f_max;
  set.f = tau.tau / (2.0 * l);
  for (int i = 0; i < 3; ++i) {
    if (std::abs(set.f(i)) > f_max) {
      set.f(i) = std::copysign(f_max, set.f(i));
      set.saturated = true;
    }
  }
  return set;
}

/// Sum of R x F over all six thrusters.
inline TorqueCommand thrusts_to_torques(const ThrusterSet& set, double l) {
  if (!(l > 0.0)) throw std::invalid_argument("thrusts_to_torques: l must be > 0");
  TorqueCommand cmd;
  for (const auto& t : thruster_table()) {
    const Eigen::Vector3d pos = l * t.position;
    const Eigen::Vector3d force = set.f(t.pair) * t.direction;
    cmd.tau += pos.cross(force);
  }
  return cmd;
}

/// Net force of the arrangement; zero for every ThrusterSet.
inline Eigen::Vector3d net_thruster_force(const ThrusterSet& set) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& t : thruster_table()) sum += set.f(t.pair) * t.direction;
  return sum;
}

}  // namespace spiros
