#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

#include "spiros/numeric_io.hpp"

namespace spiros {

/// Gradient magnitude below which a surface point is treated as flat.
inline constexpr double kEpsGrad = 1e-9;

/// First-order (plus curvature) data of the surface z = f(x, y) at a point.
///
/// s = (fx^2 + fy^2)^(-1/2) is undefined at flat points; `s_defined`
/// flags that case instead of storing an infinity.
struct SurfaceJet {
  double z = 0.0;
  double fx = 0.0;
  double fy = 0.0;
  double s = 0.0;
  double sn = 1.0;
  bool s_defined = false;
  // Second partials, used only by the full-derivative velocity-coupling mode.
  double fxx = 0.0;
  double fxy = 0.0;
  double fyy = 0.0;

  double grad_norm() const { return std::hypot(fx, fy); }
  bool flat() const { return !s_defined; }
};

/// Analytic terrain z = f(x, y) with first and second partial derivatives.
class TerrainSurface {
 public:
  virtual ~TerrainSurface() = default;

  virtual double elevation(double x, double y) const = 0;
  virtual void gradient(double x, double y, double& fx, double& fy) const = 0;
  virtual void hessian(double x, double y, double& fxx, double& fxy,
                       double& fyy) const {
    (void)x;
    (void)y;
    fxx = fxy = fyy = 0.0;
  }

  /// Emits the flat config keys (terrain.*) that reconstruct this surface.
  virtual void describe(std::map<std::string, std::string>& keys) const = 0;
};

using TerrainPtr = std::shared_ptr<const TerrainSurface>;

class FlatPlane final : public TerrainSurface {
 public:
  double elevation(double, double) const override { return 0.0; }
  void gradient(double, double, double& fx, double& fy) const override {
    fx = 0.0;
    fy = 0.0;
  }
  void describe(std::map<std::string, std::string>& keys) const override {
    keys["terrain.kind"] = "flat";
  }
};

/// Inclined plane z = tan(slope) * x.
class InclinedRamp final : public TerrainSurface {
 public:
  explicit InclinedRamp(double slope_rad)
      : slope_(slope_rad), m_(std::tan(slope_rad)) {
    if (!(std::abs(slope_rad) < M_PI / 2.0) || !std::isfinite(m_))
      throw std::invalid_argument("ramp: slope must lie in (-pi/2, pi/2)");
  }
  double elevation(double x, double) const override { return m_ * x; }
  void gradient(double, double, double& fx, double& fy) const override {
    fx = m_;
    fy = 0.0;
  }
  void describe(std::map<std::string, std::string>& keys) const override {
    keys["terrain.kind"] = "ramp";
    keys["terrain.slope"] = format_double(slope_);
  }
  double slope() const { return slope_; }

 private:
  double slope_;
  double m_;
};

/// z = A * (cos(2*pi*x/p) + cos(2*pi*y/p) - 2).
class CosineTerrain final : public TerrainSurface {
 public:
  CosineTerrain(double amplitude, double period)
      : a_(amplitude), p_(period), w_(2.0 * M_PI / period) {
    if (!(period > 0.0)) throw std::invalid_argument("cosine: period <= 0");
  }
  double elevation(double x, double y) const override {
    return a_ * (std::cos(w_ * x) + std::cos(w_ * y) - 2.0);
  }
  void gradient(double x, double y, double& fx, double& fy) const override {
    fx = -a_ * w_ * std::sin(w_ * x);
    fy = -a_ * w_ * std::sin(w_ * y);
  }
  void hessian(double x, double y, double& fxx, double& fxy,
               double& fyy) const override {
    fxx = -a_ * w_ * w_ * std::cos(w_ * x);
    fxy = 0.0;
    fyy = -a_ * w_ * w_ * std::cos(w_ * y);
  }
  void describe(std::map<std::string, std::string>& keys) const override {
    keys["terrain.kind"] = "cosine";
    keys["terrain.amplitude"] = format_double(a_);
    keys["terrain.period"] = format_double(p_);
  }

 private:
  double a_, p_, w_;
};

/// Sum of two surfaces; covers user compositions such as a bumpy ramp.
class CompositeTerrain final : public TerrainSurface {
 public:
  CompositeTerrain(TerrainPtr a, TerrainPtr b) : a_(std::move(a)), b_(std::move(b)) {
    if (!a_ || !b_) throw std::invalid_argument("composite: null part");
  }
  double elevation(double x, double y) const override {
    return a_->elevation(x, y) + b_->elevation(x, y);
  }
  void gradient(double x, double y, double& fx, double& fy) const override {
    double ax, ay, bx, by;
    a_->gradient(x, y, ax, ay);
    b_->gradient(x, y, bx, by);
    fx = ax + bx;
    fy = ay + by;
  }
  void hessian(double x, double y, double& fxx, double& fxy,
               double& fyy) const override {
    double a1, a2, a3, b1, b2, b3;
    a_->hessian(x, y, a1, a2, a3);
    b_->hessian(x, y, b1, b2, b3);
    fxx = a1 + b1;
    fxy = a2 + b2;
    fyy = a3 + b3;
  }
  void describe(std::map<std::string, std::string>& keys) const override {
    std::map<std::string, std::string> ka, kb;
    a_->describe(ka);
    b_->describe(kb);
    const std::string kind = ka["terrain.kind"] + "+" + kb["terrain.kind"];
    ka.erase("terrain.kind");
    kb.erase("terrain.kind");
    for (const auto& [k, v] : ka) keys[k] = v;
    for (const auto& [k, v] : kb) keys[k] = v;
    keys["terrain.kind"] = kind;
  }

 private:
  TerrainPtr a_, b_;
};

/// Evaluates the surface jet at (x, y). The flat-point case is encoded
/// via s_defined = false, never thrown.
inline SurfaceJet surface_jet(const TerrainSurface& surface, double x, double y) {
  SurfaceJet jet;
  jet.z = surface.elevation(x, y);
  surface.gradient(x, y, jet.fx, jet.fy);
  surface.hessian(x, y, jet.fxx, jet.fxy, jet.fyy);
  const double g2 = jet.fx * jet.fx + jet.fy * jet.fy;
  jet.sn = 1.0 / std::sqrt(g2 + 1.0);
  if (g2 < kEpsGrad * kEpsGrad) {
    jet.s_defined = false;
    jet.s = 0.0;
    jet.sn = 1.0;  // exact in the flat case
  } else {
    jet.s_defined = true;
    jet.s = 1.0 / std::sqrt(g2);
  }
  return jet;
}

/// Jet built directly from gradient components (no surface object); handy
/// for randomized frame tests.
inline SurfaceJet jet_from_gradient(double fx, double fy, double z = 0.0) {
  SurfaceJet jet;
  jet.z = z;
  jet.fx = fx;
  jet.fy = fy;
  const double g2 = fx * fx + fy * fy;
  jet.sn = 1.0 / std::sqrt(g2 + 1.0);
  if (g2 < kEpsGrad * kEpsGrad) {
    jet.s_defined = false;
    jet.s = 0.0;
    jet.sn = 1.0;
  } else {
    jet.s_defined = true;
    jet.s = 1.0 / std::sqrt(g2);
  }
  return jet;
}

}  // namespace spiros
