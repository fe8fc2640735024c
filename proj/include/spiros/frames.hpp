#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "spiros/terrain.hpp"

namespace spiros {

using Eigen::Matrix3d;
using Eigen::Vector3d;

/// Yaw / pitch / roll pose, radians. Extraction normalizes beta to
/// [-pi/2, pi/2] and alpha, gamma to (-pi, pi].
struct EulerPose {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// Intrinsic z-y-x rotation: Rz(alpha) * Ry(beta) * Rx(gamma).
inline Matrix3d rot_ypr(const EulerPose& pose) {
  const double ca = std::cos(pose.alpha), sa = std::sin(pose.alpha);
  const double cb = std::cos(pose.beta), sb = std::sin(pose.beta);
  const double cg = std::cos(pose.gamma), sg = std::sin(pose.gamma);
  Matrix3d r;
  r << ca * cb, ca * sb * sg - sa * cg, ca * sb * cg + sa * sg,
       sa * cb, sa * sb * sg + ca * cg, sa * sb * cg - ca * sg,
       -sb, cb * sg, cb * cg;
  return r;
}

/// Inverse of rot_ypr. At gimbal lock (|beta| = pi/2) gamma is set to 0
/// and the residual folded into alpha.
inline EulerPose euler_from_rotation(const Matrix3d& r) {
  EulerPose pose;
  const double sb = -r(2, 0);
  if (std::abs(sb) >= 1.0 - 1e-12) {
    pose.beta = std::copysign(M_PI / 2.0, sb);
    pose.gamma = 0.0;
    pose.alpha = std::atan2(-r(0, 1), r(1, 1));
  } else {
    pose.beta = std::asin(sb);
    pose.alpha = std::atan2(r(1, 0), r(0, 0));
    pose.gamma = std::atan2(r(2, 1), r(2, 2));
  }
  return pose;
}

/// Surface-attached frame: heading p_hat, lateral e_hat, outward normal n_hat,
/// each a world-frame unit vector.
struct TangentBasis {
  Vector3d p_hat = Vector3d::UnitX();
  Vector3d e_hat = -Vector3d::UnitY();
  Vector3d n_hat = Vector3d::UnitZ();

  Matrix3d as_matrix() const {
    Matrix3d m;
    m.col(0) = p_hat;
    m.col(1) = e_hat;
    m.col(2) = n_hat;
    return m;
  }
};

/// Builds {p_hat, e_hat, n_hat} from a surface jet. At flat points the
/// lateral/heading directions are undefined; the fixed convention
/// p_hat = [1,0,0], e_hat = [0,-1,0] applies.
inline TangentBasis tangent_basis(const SurfaceJet& jet) {
  TangentBasis basis;
  if (jet.flat()) {
    return basis;  // convention
  }
  basis.n_hat = jet.sn * Vector3d(-jet.fx, -jet.fy, 1.0);
  basis.e_hat = jet.s * Vector3d(jet.fy, -jet.fx, 0.0);
  basis.p_hat = basis.e_hat.cross(basis.n_hat);
  return basis;
}

/// Rotation whose columns are the robot-side tangent frame {h_hat, l_hat,
/// n_hat} in world coordinates; rotates with the turning angle psi.
struct BodyFrameBasis {
  Matrix3d a = Matrix3d::Identity();

  Vector3d h_hat() const { return a.col(0); }
  Vector3d l_hat() const { return a.col(1); }
  Vector3d n_hat() const { return a.col(2); }
};

/// Fills the nine a_jk elements. Near-flat points use the analytic limit,
/// a pure psi-rotation about z.
inline BodyFrameBasis body_frame(const SurfaceJet& jet, double psi) {
  const double cp = std::cos(psi), sp = std::sin(psi);
  BodyFrameBasis basis;
  if (jet.flat()) {
    basis.a << cp, sp, 0.0,
               -sp, cp, 0.0,
               0.0, 0.0, 1.0;
    return basis;
  }
  const double g2 = jet.fx * jet.fx + jet.fy * jet.fy;
  const double one_msn = 1.0 - jet.sn;
  // s^2 fx^2 (1 - sn) written as (fx^2 / g2)(1 - sn): stable near flat.
  const double txx = (jet.fx * jet.fx / g2) * one_msn;
  const double txy = (jet.fx * jet.fy / g2) * one_msn;
  const double tyy = (jet.fy * jet.fy / g2) * one_msn;
  const double sn = jet.sn;
  basis.a << (1.0 - txx) * cp + txy * sp, (1.0 - txx) * sp - txy * cp, -sn * jet.fx,
             -txy * cp - (1.0 - tyy) * sp, -txy * sp + (1.0 - tyy) * cp, -sn * jet.fy,
             sn * jet.fx * cp - sn * jet.fy * sp, sn * jet.fx * sp + sn * jet.fy * cp, sn;
  return basis;
}

/// Transform taking (Theta'', Phi'', Psi'') to angular accelerations about
/// {p_hat, e_hat, n_hat}, built from the in-plane angle xi. Orthogonal
/// (an isometry); the upper-left 2x2 block has determinant -1 because the
/// rolling axis ordering swaps heading and lateral roles.
inline Matrix3d xi_transform(const SurfaceJet& jet, double psi) {
  const double cp = std::cos(psi), sp = std::sin(psi);
  Matrix3d m = Matrix3d::Identity();
  if (jet.flat()) {
    // Dot products of the conventional {p,e} with the psi-rotated {h,l}.
    m(0, 0) = sp;
    m(0, 1) = cp;
    m(1, 0) = -cp;
    m(1, 1) = sp;
    return m;
  }
  const double cxi = jet.s * (jet.fy * sp - jet.fx * cp);
  const double sxi = jet.s * (jet.fx * sp + jet.fy * cp);
  m(0, 0) = -sxi;
  m(0, 1) = cxi;
  m(1, 0) = cxi;
  m(1, 1) = sxi;
  return m;
}

}  // namespace spiros
