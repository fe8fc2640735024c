#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "spiros/frames.hpp"
#include "spiros/inertia.hpp"
#include "spiros/terrain.hpp"

namespace spiros {

class ConstraintViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RobotParams {
  double radius = 1.0;     // m
  double mass = 0.5;       // kg
  InertiaTensor i_body;    // about CG
  double lever_arm = 0.5;  // thruster offset, m
  double gravity = 9.81;   // m/s^2

  RobotParams() { i_body = solid_sphere_inertia(mass, radius); }
  RobotParams(double r, double m, InertiaTensor i0, double l, double g = 9.81)
      : radius(r), mass(m), i_body(std::move(i0)), lever_arm(l), gravity(g) {
    validate();
  }

  void validate() const {
    if (!(radius > 0.0) || !(mass > 0.0) || !(lever_arm > 0.0) || !(gravity > 0.0))
      throw std::invalid_argument("RobotParams: radius, mass, lever_arm, gravity must be > 0");
    i_body.validate();
  }

  /// Homogeneous sphere of the given mass/radius.
  static RobotParams sphere(double r, double m, double l = 0.5, double g = 9.81) {
    return RobotParams(r, m, solid_sphere_inertia(m, r), l, g);
  }

  /// Scalar body inertia about a rolling (tangent) axis.
  double rolling_inertia() const { return i_body.m(0, 0); }
};

struct RobotState {
  Eigen::Vector3d p0 = Eigen::Vector3d::Zero();          // contact point, world
  Eigen::Matrix3d orientation = Eigen::Matrix3d::Identity();  // world <- body
  double psi = 0.0;                                      // turning angle
  Eigen::Vector3d rates = Eigen::Vector3d::Zero();       // theta_dot, phi_dot, psi_dot
  Eigen::Vector3d v = Eigen::Vector3d::Zero();           // contact-point velocity

  double theta_dot() const { return rates(0); }
  double phi_dot() const { return rates(1); }
  double psi_dot() const { return rates(2); }

  EulerPose pose() const { return euler_from_rotation(orientation); }
};

/// Body-frame moments (tau_X, tau_Y, tau_Z), N m.
struct TorqueCommand {
  Eigen::Vector3d tau = Eigen::Vector3d::Zero();
};

enum class ModelKind { ThreeR, TwoR, RT };

/// xdd = a_mat * xd + b_mat * tau + d_vec.
struct CanonicalModel {
  Eigen::Matrix3d a_mat = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d b_mat = Eigen::Matrix3d::Zero();
  Eigen::Vector3d d_vec = Eigen::Vector3d::Zero();
  ModelKind model_kind = ModelKind::ThreeR;
};

/// Velocity-coupling fidelity: Paper keeps only the psi_dot dependence of
/// the kinematic map's time derivative; FullDerivative adds the terrain
/// curvature terms through the surface jet along the velocity.
enum class CouplingMode { Paper, FullDerivative };

/// Scalar slope dynamics: angular acceleration of a sphere driven by a net
/// torque on an incline.
inline double slope_angular_accel(double tau_net, double theta,
                                  const RobotParams& params) {
  params.validate();
  const double r = params.radius, m = params.mass, g = params.gravity;
  const double i0 = params.rolling_inertia();
  return -(tau_net + r * m * g * std::sin(theta)) / (i0 + m * r * r);
}

/// Gravity component along the heading direction.
inline double weight_parallel(const SurfaceJet& jet, const RobotParams& params) {
  // s * sn * (fx^2 + fy^2) == sn * |grad f|, which is flat-safe.
  return jet.sn * jet.grad_norm() * params.mass * params.gravity;
}

/// Contact inertia expressed in the {p_hat, e_hat, n_hat} frame, where the
/// parallel-axis offset is R * [0,0,1].
inline Eigen::Matrix3d contact_inertia_pen(const SurfaceJet& jet,
                                           const RobotParams& params) {
  const Eigen::Matrix3d rp = tangent_basis(jet).as_matrix();
  Eigen::Matrix3d ipen = rp.transpose() * params.i_body.m * rp;
  const double mr2 = params.mass * params.radius * params.radius;
  ipen(0, 0) += mr2;
  ipen(1, 1) += mr2;
  return ipen;
}

/// Maps a body-frame torque command to (Theta'', Phi'', Psi'').
///
/// The gravity term enters with the sign that makes a torque-free sphere
/// accelerate down-slope (see also accel_to_torque, its exact inverse).
inline Eigen::Vector3d body_angular_accel(const TorqueCommand& tau,
                                          const RobotState& state,
                                          const SurfaceJet& jet,
                                          const RobotParams& params) {
  const Eigen::Matrix3d rp = tangent_basis(jet).as_matrix();
  const Eigen::Matrix3d rxin = xi_transform(jet, state.psi);
  const Eigen::Matrix3d ipen = contact_inertia_pen(jet, params);
  const Eigen::Matrix3d ipen_inv = ipen.inverse();
  const Eigen::Vector3d gvec(0.0, weight_parallel(jet, params) * params.radius, 0.0);
  return -rxin.transpose() * ipen_inv *
             (rp.transpose() * state.orientation * tau.tau) +
         rxin.transpose() * ipen_inv * gvec;
}

/// Exact algebraic inverse of body_angular_accel:
/// body_angular_accel(accel_to_torque(w)) == w.
inline TorqueCommand accel_to_torque(const Eigen::Vector3d& want,
                                     const RobotState& state,
                                     const SurfaceJet& jet,
                                     const RobotParams& params) {
  const Eigen::Matrix3d rp = tangent_basis(jet).as_matrix();
  const Eigen::Matrix3d rxin = xi_transform(jet, state.psi);
  const Eigen::Matrix3d ipen = contact_inertia_pen(jet, params);
  const Eigen::Vector3d gvec(0.0, weight_parallel(jet, params) * params.radius, 0.0);
  TorqueCommand cmd;
  cmd.tau =
      state.orientation.transpose() * rp * (gvec - ipen * rxin * want);
  return cmd;
}

/// 3x2 map from (theta_dot, phi_dot) to contact-point velocity, and its
/// Moore-Penrose pseudo-inverse (closed form: L's columns are orthogonal
/// with norm R).
inline std::pair<Eigen::Matrix<double, 3, 2>, Eigen::Matrix<double, 2, 3>>
kinematic_map(const SurfaceJet& jet, double psi, const RobotParams& params) {
  const BodyFrameBasis basis = body_frame(jet, psi);
  Eigen::Matrix<double, 3, 2> l;
  l.col(0) = params.radius * basis.h_hat();
  l.col(1) = -params.radius * basis.l_hat();
  Eigen::Matrix<double, 2, 3> ldag;
  ldag.row(0) = basis.h_hat().transpose() / params.radius;
  ldag.row(1) = -basis.l_hat().transpose() / params.radius;
  return {l, ldag};
}

/// Closed-form pseudo-inverse as printed in the source material; satisfies
/// Ldag * L = diag(1/sn, 1) rather than the identity. Kept for comparison;
/// requires fx != 0.
inline Eigen::Matrix<double, 2, 3> kinematic_map_pinv_paper(
    const SurfaceJet& jet, double psi, const RobotParams& params) {
  const Eigen::Matrix3d a = body_frame(jet, psi).a;
  const double sn = jet.sn, fx = jet.fx, r = params.radius;
  if (std::abs(fx) < kEpsGrad)
    throw std::domain_error("kinematic_map_pinv_paper: fx == 0");
  Eigen::Matrix<double, 2, 3> ldag;
  ldag << a(1, 1) / (sn * sn), -a(0, 1) / (sn * sn), 0.0,
          0.0, -a(2, 0) / (fx * sn), a(1, 0) / (fx * sn);
  return ldag / r;
}

namespace detail {

/// d a_jk / d psi has the closed form swapping columns with signs.
inline Eigen::Matrix<double, 3, 2> kinematic_map_dpsi(const SurfaceJet& jet,
                                                      double psi,
                                                      const RobotParams& params) {
  const Eigen::Matrix3d a = body_frame(jet, psi).a;
  Eigen::Matrix<double, 3, 2> dl;
  dl.col(0) = -params.radius * a.col(1);  // d h_hat / d psi = -l_hat
  dl.col(1) = -params.radius * a.col(0);  // d (-l_hat) / d psi = -h_hat
  return dl;
}

/// L_dot including terrain-curvature contributions, chain rule through the
/// surface jet along the current velocity. Gradient sensitivities by
/// central differences.
inline Eigen::Matrix<double, 3, 2> kinematic_map_dot_full(
    const SurfaceJet& jet, const RobotState& state, const RobotParams& params) {
  Eigen::Matrix<double, 3, 2> ldot =
      state.psi_dot() * kinematic_map_dpsi(jet, state.psi, params);
  const double fx_dot = jet.fxx * state.v.x() + jet.fxy * state.v.y();
  const double fy_dot = jet.fxy * state.v.x() + jet.fyy * state.v.y();
  if (fx_dot == 0.0 && fy_dot == 0.0) return ldot;
  const auto l_of = [&](double fx, double fy) {
    return kinematic_map(jet_from_gradient(fx, fy), state.psi, params).first;
  };
  const double hx = 1e-6 * std::max(1.0, std::abs(jet.fx));
  const double hy = 1e-6 * std::max(1.0, std::abs(jet.fy));
  const Eigen::Matrix<double, 3, 2> dldfx =
      (l_of(jet.fx + hx, jet.fy) - l_of(jet.fx - hx, jet.fy)) / (2.0 * hx);
  const Eigen::Matrix<double, 3, 2> dldfy =
      (l_of(jet.fx, jet.fy + hy) - l_of(jet.fx, jet.fy - hy)) / (2.0 * hy);
  ldot += dldfx * fx_dot + dldfy * fy_dot;
  return ldot;
}

inline Eigen::Matrix3d torque_map_pen(const SurfaceJet& jet,
                                      const RobotState& state) {
  const Eigen::Matrix3d rp = tangent_basis(jet).as_matrix();
  return rp.transpose() * state.orientation;
}

}  // namespace detail

/// 3R-SR canonical form and the resulting world-frame acceleration.
inline std::pair<CanonicalModel, Eigen::Vector3d> canonical_3rsr(
    const RobotState& state, const SurfaceJet& jet, const RobotParams& params,
    const TorqueCommand& tau, CouplingMode mode = CouplingMode::Paper) {
  const auto [l, ldag] = kinematic_map(jet, state.psi, params);
  Eigen::Matrix3d laug = Eigen::Matrix3d::Zero();
  laug.leftCols<2>() = l;

  const Eigen::Matrix3d rxin = xi_transform(jet, state.psi);
  const Eigen::Matrix3d ipen_inv = contact_inertia_pen(jet, params).inverse();

  CanonicalModel model;
  model.model_kind = ModelKind::ThreeR;
  if (mode == CouplingMode::Paper) {
    model.a_mat = state.psi_dot() *
                  detail::kinematic_map_dpsi(jet, state.psi, params) * ldag;
  } else {
    model.a_mat = detail::kinematic_map_dot_full(jet, state, params) * ldag;
  }
  model.b_mat = -laug * rxin.transpose() * ipen_inv *
                detail::torque_map_pen(jet, state);
  // sn * M * g * R / s written flat-safe as sn * |grad f| * M * g * R.
  const Eigen::Vector3d gvec(
      0.0, weight_parallel(jet, params) * params.radius, 0.0);
  model.d_vec = laug * rxin.transpose() * ipen_inv * gvec;

  const Eigen::Vector3d accel =
      model.a_mat * state.v + model.b_mat * tau.tau + model.d_vec;
  return {model, accel};
}

/// 2R-SR: psi_dot must be exactly zero; shares the 3R-SR code path, whose
/// velocity-coupling term then vanishes identically.
inline std::pair<CanonicalModel, Eigen::Vector3d> canonical_2rsr(
    const RobotState& state, const SurfaceJet& jet, const RobotParams& params,
    const TorqueCommand& tau, CouplingMode mode = CouplingMode::Paper) {
  if (state.psi_dot() != 0.0)
    throw ConstraintViolation("2R-SR: psi_dot must be zero");
  auto [model, accel] = canonical_3rsr(state, jet, params, tau, mode);
  model.model_kind = ModelKind::TwoR;
  model.a_mat.setZero();
  return {model, accel};
}

/// RT-SR: rolling plus turning, phi_dot must be exactly zero. Velocity is
/// confined to the heading direction.
inline std::pair<CanonicalModel, Eigen::Vector3d> canonical_rtsr(
    const RobotState& state, const SurfaceJet& jet, const RobotParams& params,
    const TorqueCommand& tau) {
  if (state.phi_dot() != 0.0)
    throw ConstraintViolation("RT-SR: phi_dot must be zero");
  const Eigen::Matrix3d a = body_frame(jet, state.psi).a;
  const Eigen::Vector3d h = a.col(0), lat = a.col(1);

  const Eigen::Matrix3d rxin = xi_transform(jet, state.psi);
  const Eigen::Matrix3d ipen_inv = contact_inertia_pen(jet, params).inverse();
  const Eigen::Matrix3d map =
      rxin.transpose() * ipen_inv * detail::torque_map_pen(jet, state);
  const Eigen::Vector3d gvec(
      0.0, weight_parallel(jet, params) * params.radius, 0.0);
  const Eigen::Vector3d gacc = rxin.transpose() * ipen_inv * gvec;

  CanonicalModel model;
  model.model_kind = ModelKind::RT;
  model.a_mat = -state.psi_dot() * lat * h.transpose();
  model.b_mat = -params.radius * h * map.row(0);
  model.d_vec = params.radius * h * gacc(0);

  const Eigen::Vector3d accel =
      model.a_mat * state.v + model.b_mat * tau.tau + model.d_vec;
  return {model, accel};
}

/// RT-SR velocity from the rolling rate alone.
inline Eigen::Vector3d rtsr_velocity(const SurfaceJet& jet, double psi,
                                     double theta_dot,
                                     const RobotParams& params) {
  return params.radius * body_frame(jet, psi).h_hat() * theta_dot;
}

}  // namespace spiros
