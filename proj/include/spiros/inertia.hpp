#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace spiros {

/// Symmetric positive-semidefinite 3x3 inertia tensor, kg m^2.
struct InertiaTensor {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();

  InertiaTensor() = default;
  explicit InertiaTensor(const Eigen::Matrix3d& mat) : m(mat) { validate(); }

  void validate() const {
    if (!m.allFinite()) throw std::invalid_argument("inertia: non-finite");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("inertia: not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    if (es.eigenvalues().minCoeff() < -1e-12)
      throw std::invalid_argument("inertia: not positive semi-definite");
    const double ixx = m(0, 0), iyy = m(1, 1), izz = m(2, 2);
    const double tol = 1e-9 * (1.0 + m.diagonal().cwiseAbs().maxCoeff());
    if (ixx > iyy + izz + tol || iyy > izz + ixx + tol || izz > ixx + iyy + tol)
      throw std::invalid_argument("inertia: triangle inequality violated");
  }
};

/// (2/5) M R^2 about every axis.
inline InertiaTensor solid_sphere_inertia(double mass, double radius) {
  if (!(mass > 0.0) || !(radius > 0.0))
    throw std::invalid_argument("solid_sphere_inertia: mass and radius must be > 0");
  return InertiaTensor(0.4 * mass * radius * radius *
                       Eigen::Matrix3d::Identity());
}

/// I = I_cm + M (|d|^2 Id - d d^T): the point-mass term of the parallel
/// axis theorem.
inline InertiaTensor parallel_axis(const InertiaTensor& i_cm, double mass,
                                   const Eigen::Vector3d& offset) {
  const Eigen::Matrix3d shift =
      mass * (offset.squaredNorm() * Eigen::Matrix3d::Identity() -
              offset * offset.transpose());
  return InertiaTensor(i_cm.m + shift);
}

struct RobotParams;  // dynamics.hpp

/// Total inertia about the contact point: I_0 plus the point-mass term at
/// offset R * n_hat.
inline InertiaTensor contact_inertia(const InertiaTensor& i_body, double mass,
                                     double radius,
                                     const Eigen::Vector3d& n_hat) {
  if (std::abs(n_hat.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("contact_inertia: n_hat must be unit-norm");
  return parallel_axis(i_body, mass, radius * n_hat);
}

}  // namespace spiros
