#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "spiros/control.hpp"
#include "spiros/dynamics.hpp"
#include "spiros/frames.hpp"
#include "spiros/terrain.hpp"

namespace spiros {

using TorqueSchedule = std::function<TorqueCommand(double, const RobotState&)>;

struct SimConfig {
  double dt = 1e-3;
  double t_end = 10.0;
  ModelKind model = ModelKind::ThreeR;
  CouplingMode coupling = CouplingMode::Paper;
  TerrainPtr terrain = std::make_shared<FlatPlane>();
  RobotParams params = RobotParams::sphere(1.0, 0.5);
  ControllerGains gains;
  double lookahead = 0.2;
  int control_every = 1;  // controller hold interval, in steps

  EulerPose initial_pose;
  RobotState initial_state;

  PathPtr path;               // closed loop when set
  TorqueSchedule schedule;    // open loop when set; free roll when neither

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be > 0");
    if (!(t_end >= dt)) throw std::invalid_argument("SimConfig: t_end < dt");
    if (!terrain) throw std::invalid_argument("SimConfig: no terrain");
    params.validate();
    gains.validate();
    const double z = terrain->elevation(initial_state.p0.x(), initial_state.p0.y());
    if (std::abs(initial_state.p0.z() - z) > 1e-6)
      throw std::invalid_argument("SimConfig: initial position not on terrain");
  }
};

struct TraceRow {
  double t, x, y, z;
  double alpha, beta, gamma, psi;
  double theta_dot, phi_dot, psi_dot;
  double tau_x, tau_y, tau_z;
  double e_norm, zeta_dev;
  double energy;
};

struct SimTrace {
  std::vector<TraceRow> rows;
  bool error = false;
  std::string error_message;
};

/// Exact exponential-map (Rodrigues) rotation by omega * dt, applied on
/// the left.
inline Eigen::Matrix3d propagate_orientation(const Eigen::Matrix3d& orientation,
                                             const Eigen::Vector3d& omega_world,
                                             double dt) {
  const double angle = omega_world.norm() * dt;
  if (angle == 0.0) return orientation;
  const Eigen::Vector3d axis = omega_world.normalized();
  return Eigen::Matrix3d(Eigen::AngleAxisd(angle, axis)) * orientation;
}

/// World angular velocity from the generalized rates: tilting about the
/// longitudinal axis, rolling about the lateral axis, turning about the
/// normal.
inline Eigen::Vector3d omega_world_from_rates(const Eigen::Vector3d& rates,
                                              const BodyFrameBasis& basis) {
  return rates(1) * basis.h_hat() + rates(0) * basis.l_hat() +
         rates(2) * basis.n_hat();
}

/// Total mechanical energy: rolling + turning kinetic terms plus potential.
inline double mechanical_energy(const RobotState& state,
                                const RobotParams& params) {
  const double i0 = params.rolling_inertia();
  const double it = i0 + params.mass * params.radius * params.radius;
  const double td = state.theta_dot(), pd = state.phi_dot(), sd = state.psi_dot();
  return 0.5 * it * (td * td + pd * pd) + 0.5 * i0 * sd * sd +
         params.mass * params.gravity * state.p0.z();
}

namespace detail {

// Integrated vector: x, y, vx, vy, psi, theta_dot, phi_dot, psi_dot.
using StateVec = Eigen::Matrix<double, 8, 1>;

inline StateVec pack(const RobotState& s) {
  StateVec y;
  y << s.p0.x(), s.p0.y(), s.v.x(), s.v.y(), s.psi, s.rates(0), s.rates(1),
      s.rates(2);
  return y;
}

inline RobotState unpack(const StateVec& y, const TerrainSurface& terrain,
                         const Eigen::Matrix3d& orientation) {
  RobotState s;
  const SurfaceJet jet = surface_jet(terrain, y(0), y(1));
  s.p0 << y(0), y(1), jet.z;
  s.v << y(2), y(3), jet.fx * y(2) + jet.fy * y(3);  // tangency enforced
  s.psi = y(4);
  s.rates << y(5), y(6), y(7);
  s.orientation = orientation;
  return s;
}

inline StateVec derivative(const StateVec& y, const TorqueCommand& tau,
                           const SimConfig& config,
                           const Eigen::Matrix3d& orientation) {
  const RobotState s = unpack(y, *config.terrain, orientation);
  const SurfaceJet jet = surface_jet(*config.terrain, s.p0.x(), s.p0.y());

  Eigen::Vector3d accel;
  switch (config.model) {
    case ModelKind::ThreeR:
      accel = canonical_3rsr(s, jet, config.params, tau, config.coupling).second;
      break;
    case ModelKind::TwoR:
      accel = canonical_2rsr(s, jet, config.params, tau, config.coupling).second;
      break;
    case ModelKind::RT:
      accel = canonical_rtsr(s, jet, config.params, tau).second;
      break;
    default:
      throw std::invalid_argument("derivative: unknown model");
  }
  Eigen::Vector3d rate_accel = body_angular_accel(tau, s, jet, config.params);
  // Restricted models hold their constrained rate at exactly zero.
  if (config.model == ModelKind::TwoR) rate_accel(2) = 0.0;
  if (config.model == ModelKind::RT) rate_accel(1) = 0.0;

  StateVec dy;
  dy << s.v.x(), s.v.y(), accel.x(), accel.y(), s.rates(2), rate_accel(0),
      rate_accel(1), rate_accel(2);
  return dy;
}

}  // namespace detail

/// One explicit RK4 step with the torque held over the step; z re-projected
/// onto the surface and the orientation advanced by the exponential map.
inline RobotState step(const RobotState& state, const TorqueCommand& tau,
                       const SimConfig& config) {
  const double dt = config.dt;
  const detail::StateVec y0 = detail::pack(state);
  const detail::StateVec k1 = detail::derivative(y0, tau, config, state.orientation);
  const detail::StateVec k2 =
      detail::derivative(y0 + 0.5 * dt * k1, tau, config, state.orientation);
  const detail::StateVec k3 =
      detail::derivative(y0 + 0.5 * dt * k2, tau, config, state.orientation);
  const detail::StateVec k4 =
      detail::derivative(y0 + dt * k3, tau, config, state.orientation);
  const detail::StateVec y1 = y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  if (!y1.allFinite())
    throw std::runtime_error("step: state left the terrain domain");

  // Orientation: exponential map with mid-step rates and the surface frame
  // at the start of the step.
  const SurfaceJet jet0 =
      surface_jet(*config.terrain, state.p0.x(), state.p0.y());
  const BodyFrameBasis basis0 = body_frame(jet0, state.psi);
  const Eigen::Vector3d mid_rates =
      0.5 * (y0.segment<3>(5) + y1.segment<3>(5));
  const Eigen::Vector3d omega = omega_world_from_rates(mid_rates, basis0);
  Eigen::Matrix3d orientation =
      propagate_orientation(state.orientation, omega, dt);

  // Re-orthonormalize on drift.
  const Eigen::Matrix3d defect =
      orientation.transpose() * orientation - Eigen::Matrix3d::Identity();
  if (defect.cwiseAbs().maxCoeff() > 1e-9) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(
        orientation, Eigen::ComputeFullU | Eigen::ComputeFullV);
    orientation = svd.matrixU() * svd.matrixV().transpose();
  }

  return detail::unpack(y1, *config.terrain, orientation);
}

/// Full fixed-step run; returns a partial trace with an error marker if the
/// state becomes invalid.
inline SimTrace run(const SimConfig& config) {
  config.validate();
  SimTrace trace;
  const long n_steps = static_cast<long>(std::floor(config.t_end / config.dt + 1e-9));
  trace.rows.reserve(n_steps + 1);

  RobotState state = config.initial_state;
  TorqueCommand tau;
  TrackingError err;

  const auto record = [&](double t) {
    const EulerPose pose = state.pose();
    trace.rows.push_back({t, state.p0.x(), state.p0.y(), state.p0.z(),
                          pose.alpha, pose.beta, pose.gamma, state.psi,
                          state.rates(0), state.rates(1), state.rates(2),
                          tau.tau.x(), tau.tau.y(), tau.tau.z(), err.norm(),
                          err.zeta_dev, mechanical_energy(state, config.params)});
  };

  try {
    for (long i = 0; i <= n_steps; ++i) {
      const double t = i * config.dt;
      const SurfaceJet jet =
          surface_jet(*config.terrain, state.p0.x(), state.p0.y());
      if (config.path) {
        const PathPoint target = config.path->sample(t);
        err = tracking_error(state, target.position, body_frame(jet, state.psi));
        if (i % config.control_every == 0)
          tau = control_step(state, jet, *config.path, t, config.gains,
                             config.model, config.params, config.lookahead);
      } else if (config.schedule) {
        tau = config.schedule(t, state);
      }
      record(t);
      if (i < n_steps) state = step(state, tau, config);
    }
  } catch (const std::exception& ex) {
    trace.error = true;
    trace.error_message = ex.what();
  }
  return trace;
}

/// Ramp-ascent scenario: pi/8 incline, unit sphere, 3R-SR controller
/// tracking a constant-speed up-slope line.
inline SimConfig scenario_ramp(const EulerPose& initial_pose) {
  SimConfig config;
  config.terrain = std::make_shared<InclinedRamp>(M_PI / 8.0);
  config.params = RobotParams::sphere(1.0, 0.5);
  config.model = ModelKind::ThreeR;
  config.dt = 1e-3;
  config.t_end = 30.0;
  config.initial_pose = initial_pose;
  config.initial_state.orientation = rot_ypr(initial_pose);
  config.initial_state.p0 = Eigen::Vector3d::Zero();
  config.path = std::make_shared<StraightLinePath>(
      config.terrain, Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 0.25,
      config.t_end + 10.0);
  return config;
}

/// Circular-tracking scenario on the cosine terrain; the robot starts on
/// the reference with matched velocity, heading and turn rate.
inline SimConfig scenario_circle() {
  SimConfig config;
  config.terrain = std::make_shared<CosineTerrain>(0.5, 8.0);
  config.params = RobotParams::sphere(1.0, 0.5);
  config.model = ModelKind::ThreeR;
  // The simplified velocity coupling lets the contact velocity drift away
  // from the rolling rates on curved ground, which shows up as slow
  // aperiodic torque wander; the full mode keeps the lap-to-lap signal clean.
  config.coupling = CouplingMode::FullDerivative;
  config.dt = 1e-3;
  config.t_end = 60.0;
  const double period = 10.0;
  auto path = std::make_shared<CirclePath>(config.terrain, 5.0, 5.0, 1.0,
                                           period, config.t_end + period);
  config.path = path;

  const PathPoint start = path->sample(0.0);
  RobotState& s = config.initial_state;
  s.p0 = start.position;
  s.v = start.velocity;
  const SurfaceJet jet = surface_jet(*config.terrain, s.p0.x(), s.p0.y());

  // Align the heading with the path velocity: xi = -psi + arg(-fx + i fy),
  // and the in-plane velocity angle chi measured from p_hat.
  const TangentBasis tb = tangent_basis(jet);
  const double chi = std::atan2(s.v.dot(tb.e_hat), s.v.dot(tb.p_hat));
  s.psi = jet.flat() ? chi : std::atan2(jet.fy, -jet.fx) - chi;
  const auto [l, ldag] = kinematic_map(jet, s.psi, config.params);
  const Eigen::Vector2d roll_rates = ldag * s.v;
  s.rates << roll_rates(0), roll_rates(1), 2.0 * M_PI / period;
  s.orientation = Eigen::Matrix3d::Identity();
  return config;
}

}  // namespace spiros
