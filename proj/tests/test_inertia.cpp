#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "spiros/inertia.hpp"

using namespace spiros;

TEST_CASE("solid sphere inertia") {
  CHECK((solid_sphere_inertia(0.5, 1.0).m - 0.2 * Eigen::Matrix3d::Identity())
            .norm() < 1e-15);
  CHECK((solid_sphere_inertia(5.0, 2.0).m - 8.0 * Eigen::Matrix3d::Identity())
            .norm() < 1e-12);
  CHECK_THROWS_AS(solid_sphere_inertia(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solid_sphere_inertia(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("solid sphere inertia matches a Monte-Carlo volume integral") {
  const double mass = 0.5, radius = 1.0;
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> coord(-radius, radius);
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  long n_in = 0;
  const long n = 1000000;
  for (long i = 0; i < n; ++i) {
    const Eigen::Vector3d p(coord(rng), coord(rng), coord(rng));
    if (p.squaredNorm() > radius * radius) continue;
    ++n_in;
    sum += p.squaredNorm() * Eigen::Matrix3d::Identity() - p * p.transpose();
  }
  const Eigen::Matrix3d mc = (mass / n_in) * sum;
  const Eigen::Matrix3d exact = solid_sphere_inertia(mass, radius).m;
  CHECK((mc - exact).cwiseAbs().maxCoeff() < 0.01 * exact(0, 0));
}

TEST_CASE("parallel axis examples") {
  const InertiaTensor i0 = solid_sphere_inertia(0.5, 1.0);
  CHECK((parallel_axis(i0, 0.5, Eigen::Vector3d::Zero()).m - i0.m).norm() ==
        0.0);

  const InertiaTensor shifted = parallel_axis(i0, 0.5, {0, 0, 1});
  Eigen::Matrix3d want;
  want << 0.7, 0, 0, 0, 0.7, 0, 0, 0, 0.2;
  CHECK((shifted.m - want).cwiseAbs().maxCoeff() < 1e-15);

  CHECK((parallel_axis(i0, 0.5, {0.3, -0.8, 0.2}).m -
         parallel_axis(i0, 0.5, {-0.3, 0.8, -0.2}).m)
            .norm() == 0.0);
}

TEST_CASE("parallel axis never decreases diagonal entries") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> off(-2.0, 2.0);
  const InertiaTensor i0 = solid_sphere_inertia(1.5, 0.8);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Vector3d d(off(rng), off(rng), off(rng));
    const InertiaTensor shifted = parallel_axis(i0, 1.5, d);
    for (int k = 0; k < 3; ++k) CHECK(shifted.m(k, k) >= i0.m(k, k) - 1e-15);
  }
}

TEST_CASE("contact inertia examples") {
  const InertiaTensor i0 = solid_sphere_inertia(0.5, 1.0);
  Eigen::Matrix3d up;
  up << 0.7, 0, 0, 0, 0.7, 0, 0, 0, 0.2;
  CHECK((contact_inertia(i0, 0.5, 1.0, {0, 0, 1}).m - up).cwiseAbs().maxCoeff() <
        1e-15);

  Eigen::Matrix3d side;
  side << 0.2, 0, 0, 0, 0.7, 0, 0, 0, 0.7;
  CHECK((contact_inertia(i0, 0.5, 1.0, {1, 0, 0}).m - side)
            .cwiseAbs()
            .maxCoeff() < 1e-15);

  const Eigen::Vector3d ramp_n(-0.3826834323650898, 0.0, 0.9238795325112867);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(
      contact_inertia(i0, 0.5, 1.0, ramp_n).m);
  CHECK(es.eigenvalues()(0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(es.eigenvalues()(1) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(es.eigenvalues()(2) == doctest::Approx(0.7).epsilon(1e-12));

  CHECK_THROWS_AS(contact_inertia(i0, 0.5, 1.0, {0, 0, 2}),
                  std::invalid_argument);
}

TEST_CASE("contact inertia spectrum for random normals") {
  std::mt19937 rng(23);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double mass = 0.5, radius = 1.0;
  const InertiaTensor i0 = solid_sphere_inertia(mass, radius);
  for (int i = 0; i < 500; ++i) {
    Eigen::Vector3d n(gauss(rng), gauss(rng), gauss(rng));
    if (n.norm() < 1e-6) continue;
    n.normalize();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(
        contact_inertia(i0, mass, radius, n).m);
    const double lo = 0.4 * mass * radius * radius;
    const double hi = 1.4 * mass * radius * radius;
    CHECK(es.eigenvalues()(0) == doctest::Approx(lo).epsilon(1e-12));
    CHECK(es.eigenvalues()(1) == doctest::Approx(hi).epsilon(1e-12));
    CHECK(es.eigenvalues()(2) == doctest::Approx(hi).epsilon(1e-12));
  }
}

TEST_CASE("inertia validation rejects bad tensors") {
  Eigen::Matrix3d asym;
  asym << 1, 0.5, 0, 0, 1, 0, 0, 0, 1;
  CHECK_THROWS_AS(InertiaTensor{asym}, std::invalid_argument);

  Eigen::Matrix3d negdef = -Eigen::Matrix3d::Identity();
  CHECK_THROWS_AS(InertiaTensor{negdef}, std::invalid_argument);

  Eigen::Matrix3d triangle = Eigen::Vector3d(10.0, 1.0, 1.0).asDiagonal();
  CHECK_THROWS_AS(InertiaTensor{triangle}, std::invalid_argument);
}
