#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "spiros/dynamics.hpp"
#include "spiros/frames.hpp"
#include "spiros/terrain.hpp"

namespace spiros {

/// Path-tracking gains. k_e softens the error feedback so commands stay
/// bounded: ||e|| / (k_e + ||e||) is always in [0, 1).
struct ControllerGains {
  double k_theta = 2.0;
  double k_theta1 = 2.0;
  double k_theta2 = 0.5;
  double k_phi = 2.0;
  double k_phi1 = 2.0;
  double k_phi2 = 0.5;
  double k_psi = 1.5;
  double k_e = 0.5;

  void validate() const {
    const double vals[] = {k_theta, k_theta1, k_theta2, k_phi,
                           k_phi1,  k_phi2,  k_psi,   k_e};
    for (double v : vals)
      if (!(v > 0.0))
        throw std::invalid_argument("ControllerGains: all gains must be > 0");
  }
};

struct PathPoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
};

/// Time-parametrized reference curve on the terrain: (x, y) from the
/// concrete path, z slaved to the surface, z derivatives by chain rule.
class ReferencePath {
 public:
  ReferencePath(TerrainPtr terrain, double duration)
      : terrain_(std::move(terrain)), duration_(duration) {
    if (!terrain_) throw std::invalid_argument("ReferencePath: null terrain");
  }
  virtual ~ReferencePath() = default;

  double duration() const { return duration_; }
  const TerrainSurface& terrain() const { return *terrain_; }

  /// Emits the flat config keys (path.*) that reconstruct this path.
  virtual void describe(std::map<std::string, std::string>& keys) const = 0;

  PathPoint sample(double t) const {
    Eigen::Vector2d xy, dxy, ddxy;
    sample_xy(t, xy, dxy, ddxy);
    const SurfaceJet jet = surface_jet(*terrain_, xy.x(), xy.y());
    PathPoint p;
    p.position << xy.x(), xy.y(), jet.z;
    const double zd = jet.fx * dxy.x() + jet.fy * dxy.y();
    const double zdd = jet.fxx * dxy.x() * dxy.x() +
                       2.0 * jet.fxy * dxy.x() * dxy.y() +
                       jet.fyy * dxy.y() * dxy.y() + jet.fx * ddxy.x() +
                       jet.fy * ddxy.y();
    p.velocity << dxy.x(), dxy.y(), zd;
    p.accel << ddxy.x(), ddxy.y(), zdd;
    return p;
  }

 protected:
  virtual void sample_xy(double t, Eigen::Vector2d& xy, Eigen::Vector2d& dxy,
                         Eigen::Vector2d& ddxy) const = 0;

 private:
  TerrainPtr terrain_;
  double duration_;
};

using PathPtr = std::shared_ptr<const ReferencePath>;

/// Constant-velocity straight line in the xy plane.
class StraightLinePath final : public ReferencePath {
 public:
  StraightLinePath(TerrainPtr terrain, const Eigen::Vector2d& start,
                   const Eigen::Vector2d& direction, double speed,
                   double duration)
      : ReferencePath(std::move(terrain), duration),
        start_(start),
        dir_(direction.normalized()),
        speed_(speed),
        vel_(direction.normalized() * speed) {}

  void describe(std::map<std::string, std::string>& keys) const override {
    keys["path.kind"] = "line";
    keys["path.start_x"] = format_double(start_.x());
    keys["path.start_y"] = format_double(start_.y());
    keys["path.dir_x"] = format_double(dir_.x());
    keys["path.dir_y"] = format_double(dir_.y());
    keys["path.speed"] = format_double(speed_);
    keys["path.duration"] = format_double(duration());
  }

 protected:
  void sample_xy(double t, Eigen::Vector2d& xy, Eigen::Vector2d& dxy,
                 Eigen::Vector2d& ddxy) const override {
    xy = start_ + t * vel_;
    dxy = vel_;
    ddxy.setZero();
  }

 private:
  Eigen::Vector2d start_, dir_;
  double speed_;
  Eigen::Vector2d vel_;
};

/// Circle x = cx + r sin(2 pi t / T), y = cy + r cos(2 pi t / T).
class CirclePath final : public ReferencePath {
 public:
  CirclePath(TerrainPtr terrain, double cx, double cy, double radius,
             double period, double duration)
      : ReferencePath(std::move(terrain), duration),
        cx_(cx),
        cy_(cy),
        r_(radius),
        period_(period),
        w_(2.0 * M_PI / period) {
    if (!(period > 0.0)) throw std::invalid_argument("CirclePath: period <= 0");
  }

  void describe(std::map<std::string, std::string>& keys) const override {
    keys["path.kind"] = "circle";
    keys["path.cx"] = format_double(cx_);
    keys["path.cy"] = format_double(cy_);
    keys["path.radius"] = format_double(r_);
    keys["path.period"] = format_double(period_);
    keys["path.duration"] = format_double(duration());
  }

 protected:
  void sample_xy(double t, Eigen::Vector2d& xy, Eigen::Vector2d& dxy,
                 Eigen::Vector2d& ddxy) const override {
    const double a = w_ * t;
    xy << cx_ + r_ * std::sin(a), cy_ + r_ * std::cos(a);
    dxy << r_ * w_ * std::cos(a), -r_ * w_ * std::sin(a);
    ddxy << -r_ * w_ * w_ * std::sin(a), -r_ * w_ * w_ * std::cos(a);
  }

 private:
  double cx_, cy_, r_, period_, w_;
};

/// Natural cubic spline through timed xy waypoints.
class WaypointPath final : public ReferencePath {
 public:
  struct Waypoint {
    double t;
    Eigen::Vector2d xy;
  };

  WaypointPath(TerrainPtr terrain, std::vector<Waypoint> points)
      : ReferencePath(std::move(terrain),
                      points.empty() ? 0.0 : points.back().t),
        pts_(std::move(points)) {
    if (pts_.size() < 2)
      throw std::invalid_argument("WaypointPath: need at least 2 waypoints");
    for (size_t i = 1; i < pts_.size(); ++i)
      if (!(pts_[i].t > pts_[i - 1].t))
        throw std::invalid_argument("WaypointPath: times must increase");
    solve_spline();
  }

  void describe(std::map<std::string, std::string>& keys) const override {
    keys["path.kind"] = "waypoints";
    std::string pts;
    for (const Waypoint& w : pts_) {
      if (!pts.empty()) pts += ';';
      pts += format_double(w.t) + ":" + format_double(w.xy.x()) + ":" +
             format_double(w.xy.y());
    }
    keys["path.points"] = pts;
  }

 protected:
  void sample_xy(double t, Eigen::Vector2d& xy, Eigen::Vector2d& dxy,
                 Eigen::Vector2d& ddxy) const override {
    const double tc = std::clamp(t, pts_.front().t, pts_.back().t);
    size_t i = 1;
    while (i + 1 < pts_.size() && tc > pts_[i].t) ++i;
    const double h = pts_[i].t - pts_[i - 1].t;
    const double u = tc - pts_[i - 1].t;
    for (int d = 0; d < 2; ++d) {
      const double y0 = pts_[i - 1].xy(d), y1 = pts_[i].xy(d);
      const double m0 = m_[i - 1](d), m1 = m_[i](d);
      xy(d) = m0 * std::pow(h - u, 3) / (6 * h) + m1 * std::pow(u, 3) / (6 * h) +
              (y0 / h - m0 * h / 6) * (h - u) + (y1 / h - m1 * h / 6) * u;
      dxy(d) = -m0 * std::pow(h - u, 2) / (2 * h) + m1 * std::pow(u, 2) / (2 * h) -
               (y0 / h - m0 * h / 6) + (y1 / h - m1 * h / 6);
      ddxy(d) = m0 * (h - u) / h + m1 * u / h;
    }
  }

 private:
  void solve_spline() {
    // Tridiagonal solve for the spline second derivatives, natural ends.
    const size_t n = pts_.size();
    m_.assign(n, Eigen::Vector2d::Zero());
    if (n == 2) return;
    std::vector<double> a(n, 0), b(n, 0), c(n, 0);
    std::vector<Eigen::Vector2d> rhs(n, Eigen::Vector2d::Zero());
    b[0] = b[n - 1] = 1.0;
    for (size_t i = 1; i + 1 < n; ++i) {
      const double h0 = pts_[i].t - pts_[i - 1].t;
      const double h1 = pts_[i + 1].t - pts_[i].t;
      a[i] = h0 / 6;
      b[i] = (h0 + h1) / 3;
      c[i] = h1 / 6;
      rhs[i] = (pts_[i + 1].xy - pts_[i].xy) / h1 - (pts_[i].xy - pts_[i - 1].xy) / h0;
    }
    for (size_t i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m_[n - 1] = rhs[n - 1] / b[n - 1];
    for (size_t i = n - 1; i-- > 0;)
      m_[i] = (rhs[i] - c[i] * m_[i + 1]) / b[i];
  }

  std::vector<Waypoint> pts_;
  std::vector<Eigen::Vector2d> m_;
};

/// Position error and the signed in-plane deviation angle from the heading
/// direction h_hat to the target.
struct TrackingError {
  Eigen::Vector3d e_t = Eigen::Vector3d::Zero();
  double zeta_dev = 0.0;

  double norm() const { return e_t.norm(); }
};

inline constexpr double kEpsProj = 1e-9;

/// Error scale (in meters) below which the zeta-driven terms are tapered
/// off. The deviation angle of a vanishing error vector is pure noise, and
/// the terms not scaled by the softening factor would otherwise turn each
/// pass through zero error into a full-scale kick of random sign.
inline constexpr double kZetaReg = 1e-3;

namespace detail {
inline double zeta_taper(double e_norm) {
  return e_norm * e_norm / (e_norm * e_norm + kZetaReg * kZetaReg);
}
}  // namespace detail

/// The error is taken at the rendezvous time: the target sampled `horizon`
/// seconds ahead against the robot's ballistic position p0 + horizon * v.
/// At horizon = 0 this is the plain position error. The velocity term is
/// what stabilizes the loop: the acceleration-level laws carry no rate
/// feedback of their own, so without it every tracking error orbits the
/// target undamped.
inline TrackingError tracking_error(const RobotState& state,
                                    const Eigen::Vector3d& target,
                                    const BodyFrameBasis& basis,
                                    double horizon = 0.0) {
  TrackingError err;
  err.e_t = target - (state.p0 + horizon * state.v);
  const Eigen::Vector3d n = basis.n_hat();
  const Eigen::Vector3d proj = err.e_t - err.e_t.dot(n) * n;
  if (proj.norm() < kEpsProj) {
    err.zeta_dev = 0.0;
    return err;
  }
  const Eigen::Vector3d h = basis.h_hat();
  err.zeta_dev = std::atan2(n.dot(h.cross(proj)), h.dot(proj));
  return err;
}

/// Angular-acceleration commands (Theta'', Phi'', Psi'').
inline Eigen::Vector3d ctrl_3rsr(const TrackingError& err, double path_accel,
                                 const ControllerGains& gains, double radius) {
  gains.validate();
  const double soft = err.norm() / (gains.k_e + err.norm());
  const double z = err.zeta_dev;
  // Turning enters negated: psi is a clockwise angle about n_hat
  // (d h_hat / d psi = -l_hat), so a positive deviation needs psi to fall.
  // sin(zeta) rather than raw zeta: the raw angle is discontinuous at the
  // +-pi seam, which a converged tracker crosses on every pass through
  // zero error, turning fp noise into full-scale turn commands.
  const double reg = detail::zeta_taper(err.norm());
  return {gains.k_theta * soft * std::cos(z) + path_accel / radius,
          -(gains.k_phi * soft + gains.k_phi2 * reg) * std::sin(z),
          -gains.k_psi * reg * std::sin(z)};
}

inline Eigen::Vector3d ctrl_2rsr(const TrackingError& err,
                                 const ControllerGains& gains) {
  gains.validate();
  const double soft = err.norm() / (gains.k_e + err.norm());
  const double z = err.zeta_dev;
  const double reg = detail::zeta_taper(err.norm());
  return {(gains.k_theta1 * soft + gains.k_theta2 * reg) * std::cos(z),
          -(gains.k_phi1 * soft + gains.k_phi2 * reg) * std::sin(z),
          0.0};
}

inline Eigen::Vector3d ctrl_rtsr(const TrackingError& err, double path_accel,
                                 const ControllerGains& gains, double radius) {
  gains.validate();
  const double soft = err.norm() / (gains.k_e + err.norm());
  const double z = err.zeta_dev;
  return {gains.k_theta * soft * std::cos(z) + path_accel / radius,
          0.0,
          -gains.k_psi * detail::zeta_taper(err.norm()) * std::sin(z)};
}

/// One controller evaluation: sample the path at the lookahead time,
/// form the tracking error, dispatch by mode, convert to a body torque.
inline TorqueCommand control_step(const RobotState& state, const SurfaceJet& jet,
                                  const ReferencePath& path, double t,
                                  const ControllerGains& gains, ModelKind mode,
                                  const RobotParams& params,
                                  double lookahead = 0.2) {
  const PathPoint target = path.sample(t + lookahead);
  const BodyFrameBasis basis = body_frame(jet, state.psi);
  const TrackingError err =
      tracking_error(state, target.position, basis, lookahead);
  // Feed forward the along-heading component of the reference acceleration,
  // not its norm: on a curved path the centripetal part is no forward
  // demand, and feeding it into Theta'' parks the equilibrium with the
  // target dead astern (zeta at the +-pi seam, so the turning command
  // flips sign on noise).
  const double path_accel = target.accel.dot(basis.h_hat());
  Eigen::Vector3d want;
  switch (mode) {
    case ModelKind::ThreeR:
      want = ctrl_3rsr(err, path_accel, gains, params.radius);
      break;
    case ModelKind::TwoR:
      want = ctrl_2rsr(err, gains);
      break;
    case ModelKind::RT:
      want = ctrl_rtsr(err, path_accel, gains, params.radius);
      break;
    default:
      throw std::invalid_argument("control_step: unknown mode");
  }
  return accel_to_torque(want, state, jet, params);
}

}  // namespace spiros
