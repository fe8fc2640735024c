#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "spiros/sim.hpp"
#include "spiros/trace_io.hpp"

using namespace spiros;

namespace {

const double kFreeRollAccel = (5.0 / 7.0) * 9.81 * std::sin(M_PI / 8.0);

SimConfig free_roll_on_ramp(double t_end, double dt = 1e-3) {
  SimConfig config;
  config.terrain = std::make_shared<InclinedRamp>(M_PI / 8.0);
  config.dt = dt;
  config.t_end = t_end;
  return config;
}

}  // namespace

TEST_CASE("orientation propagation") {
  const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  CHECK((propagate_orientation(id, Eigen::Vector3d::Zero(), 0.1) - id).norm() ==
        0.0);

  const Eigen::Matrix3d half =
      propagate_orientation(id, Eigen::Vector3d(0, 0, M_PI), 1.0);
  Eigen::Matrix3d want;
  want << -1, 0, 0, 0, -1, 0, 0, 0, 1;
  CHECK((half - want).cwiseAbs().maxCoeff() < 1e-12);

  std::mt19937 rng(83);
  std::uniform_real_distribution<double> w(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d omega(w(rng), w(rng), w(rng));
    const double dt = 0.01;
    const Eigen::Matrix3d full = propagate_orientation(id, omega, dt);
    CHECK((full.transpose() * full - id).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::Matrix3d two_half = propagate_orientation(
        propagate_orientation(id, omega, dt / 2), omega, dt / 2);
    CHECK((full - two_half).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("step leaves a resting sphere on flat ground unchanged") {
  SimConfig config;
  RobotState rest;
  const RobotState next = step(rest, {}, config);
  CHECK((next.p0 - rest.p0).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((next.v - rest.v).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((next.rates - rest.rates).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((next.orientation - rest.orientation).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("free roll on the pi/8 ramp reaches the closed-form speed") {
  const SimTrace trace = run(free_roll_on_ramp(1.0));
  REQUIRE(!trace.error);
  const TraceRow& last = trace.rows.back();
  const double speed = std::hypot(
      last.theta_dot, last.phi_dot);  // R = 1: rates are the speed
  CHECK(speed == doctest::Approx(kFreeRollAccel).epsilon(1e-6));
  CHECK(last.x < 0.0);  // rolled down-slope
  CHECK(last.z < 0.0);
}

TEST_CASE("pure rolling on flat ground covers R * theta_dot * t") {
  SimConfig config;
  config.t_end = 1.0;
  config.initial_state.rates << 1.0, 0.0, 0.0;
  config.initial_state.v << 1.0, 0.0, 0.0;  // R * theta_dot along h_hat
  const SimTrace trace = run(config);
  REQUIRE(!trace.error);
  CHECK(trace.rows.back().x == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(trace.rows.back().y) < 1e-9);
}

TEST_CASE("trace shape and validity") {
  const SimTrace trace = run(free_roll_on_ramp(0.5));
  REQUIRE(!trace.error);
  CHECK(trace.rows.size() == 501);
  for (size_t i = 1; i < trace.rows.size(); ++i)
    CHECK(trace.rows[i].t > trace.rows[i - 1].t);
}

TEST_CASE("identical configs give bit-identical traces") {
  const SimConfig config = scenario_ramp({M_PI / 3, M_PI / 3, M_PI / 3});
  SimConfig short_run = config;
  short_run.t_end = 1.0;
  std::ostringstream a, b;
  write_trace_csv(a, run(short_run));
  write_trace_csv(b, run(short_run));
  CHECK(a.str() == b.str());
}

TEST_CASE("traces stay on the surface with clean orientations") {
  SimConfig config;
  config.terrain = std::make_shared<CosineTerrain>(0.5, 8.0);
  config.t_end = 5.0;
  config.initial_state.p0 << 1.0, 2.0, config.terrain->elevation(1.0, 2.0);
  config.initial_state.rates << 1.0, 0.5, 0.3;
  const SurfaceJet jet0 = surface_jet(*config.terrain, 1.0, 2.0);
  config.initial_state.v = kinematic_map(jet0, 0.0, config.params).first *
                           config.initial_state.rates.head<2>();
  const SimTrace trace = run(config);
  REQUIRE(!trace.error);
  for (const TraceRow& r : trace.rows)
    CHECK(std::abs(r.z - config.terrain->elevation(r.x, r.y)) < 1e-6);
}

TEST_CASE("free roll conserves energy") {
  // 10 degree plane.
  SimConfig plane;
  plane.terrain = std::make_shared<InclinedRamp>(10.0 * M_PI / 180.0);
  plane.t_end = 10.0;
  plane.initial_state.rates << 1.5, 0.5, 0.0;
  const SurfaceJet jp = surface_jet(*plane.terrain, 0.0, 0.0);
  plane.initial_state.v = kinematic_map(jp, 0.0, plane.params).first *
                          plane.initial_state.rates.head<2>();
  plane.initial_state.p0.z() = plane.terrain->elevation(0.0, 0.0);
  const SimTrace tp = run(plane);
  REQUIRE(!tp.error);
  const double e0p = tp.rows.front().energy;
  for (const TraceRow& r : tp.rows)
    CHECK(std::abs(r.energy - e0p) < 1e-4 * std::abs(e0p));

  // Cosine terrain under the full velocity coupling; the simplified
  // coupling loses energy on curved ground and is bounded, not conserved.
  SimConfig curved;
  curved.terrain = std::make_shared<CosineTerrain>(0.5, 8.0);
  curved.t_end = 10.0;
  curved.coupling = CouplingMode::FullDerivative;
  curved.initial_state.p0 << 1.0, 2.0, curved.terrain->elevation(1.0, 2.0);
  curved.initial_state.rates << 1.0, 0.5, 0.2;
  const SurfaceJet jc = surface_jet(*curved.terrain, 1.0, 2.0);
  curved.initial_state.v = kinematic_map(jc, 0.0, curved.params).first *
                           curved.initial_state.rates.head<2>();
  const SimTrace tc = run(curved);
  REQUIRE(!tc.error);
  const double e0c = tc.rows.front().energy;
  for (const TraceRow& r : tc.rows)
    CHECK(std::abs(r.energy - e0c) < 1e-2 * std::abs(e0c));

  SimConfig simplified = curved;
  simplified.coupling = CouplingMode::Paper;
  const SimTrace ts = run(simplified);
  REQUIRE(!ts.error);
  const double e0s = ts.rows.front().energy;
  double worst = 0.0;
  for (const TraceRow& r : ts.rows)
    worst = std::max(worst, std::abs(r.energy - e0s));
  CHECK(worst > 1e-2 * std::abs(e0s));  // the simplification is real
  CHECK(worst < 0.5 * std::abs(e0s));   // but bounded over 10 s
}

TEST_CASE("scenario builders match their published setups") {
  const SimConfig ramp = scenario_ramp({0, 0, 0});
  CHECK(ramp.terrain->elevation(1.0, 0.0) ==
        doctest::Approx(std::tan(M_PI / 8.0)).epsilon(1e-12));
  CHECK(ramp.params.radius == 1.0);
  CHECK(ramp.params.mass == 0.5);

  const SimConfig circle = scenario_circle();
  const PathPoint start = circle.path->sample(0.0);
  CHECK(start.position.x() == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(start.position.y() == doctest::Approx(6.0).epsilon(1e-12));
  const PathPoint period = circle.path->sample(10.0);
  CHECK(period.position.x() == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(period.position.y() == doctest::Approx(6.0).epsilon(1e-9));
  // Start state rides the reference.
  CHECK((circle.initial_state.v - start.velocity).norm() < 1e-12);
}

TEST_CASE("config validation rejects off-terrain starts") {
  SimConfig config;
  config.terrain = std::make_shared<InclinedRamp>(M_PI / 8.0);
  config.initial_state.p0 << 1.0, 0.0, 0.0;  // ramp elevation is tan(pi/8)
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.initial_state.p0.z() = config.terrain->elevation(1.0, 0.0);
  CHECK_NOTHROW(config.validate());
  config.dt = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("trace CSV round-trips through the shortest decimal format") {
  const SimTrace trace = run(free_roll_on_ramp(0.1));
  std::ostringstream out;
  write_trace_csv(out, trace);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == kTraceHeader);
  std::string line;
  size_t row = 0;
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    CHECK(parse_double(cell) == trace.rows[row].t);
    std::getline(cells, cell, ',');
    CHECK(parse_double(cell) == trace.rows[row].x);
    ++row;
  }
  CHECK(row == trace.rows.size());
}
