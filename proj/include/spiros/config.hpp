#pragma once

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spiros/control.hpp"
#include "spiros/numeric_io.hpp"
#include "spiros/sim.hpp"
#include "spiros/terrain.hpp"

namespace spiros {

/// Flat dotted-key config text: one `key = value` per line, '#' comments.
/// Unknown keys are an error, never ignored.
class ConfigMap {
 public:
  ConfigMap() = default;

  static ConfigMap parse(std::istream& in) {
    ConfigMap cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": expected key = value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": empty key");
      if (cfg.entries_.count(key))
        throw std::invalid_argument("duplicate config key: " + key);
      cfg.entries_[key] = value;
    }
    return cfg;
  }

  static ConfigMap parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  void set(const std::string& key, const std::string& value) {
    entries_[key] = value;
  }

  /// Applies a command-line `key=value` override on top of the file values.
  void apply_override(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("override must be key=value: " + kv);
    entries_[trim(kv.substr(0, eq))] = trim(kv.substr(eq + 1));
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string take_string(const std::string& key, const std::string& fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string v = it->second;
    entries_.erase(it);
    return v;
  }

  double take_double(const std::string& key, double fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    double v;
    try {
      v = parse_double(it->second);
    } catch (const std::exception&) {
      throw std::invalid_argument("config key " + key +
                                  ": not a number: " + it->second);
    }
    entries_.erase(it);
    return v;
  }

  long take_long(const std::string& key, long fallback) {
    const double v = take_double(key, static_cast<double>(fallback));
    const long n = static_cast<long>(v);
    if (static_cast<double>(n) != v)
      throw std::invalid_argument("config key " + key + ": not an integer");
    return n;
  }

  /// After building, anything still present is a key nobody consumed.
  void reject_leftovers() const {
    if (entries_.empty()) return;
    std::string msg = "unknown config key";
    if (entries_.size() > 1) msg += "s";
    msg += ":";
    for (const auto& [k, v] : entries_) msg += " " + k;
    throw std::invalid_argument(msg);
  }

  std::string dump() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  }

  std::map<std::string, std::string> entries_;
};

namespace detail {

inline TerrainPtr build_terrain_part(const std::string& kind, ConfigMap& cfg) {
  if (kind == "flat") return std::make_shared<FlatPlane>();
  if (kind == "ramp") {
    if (!cfg.has("terrain.slope"))
      throw std::invalid_argument("missing config key: terrain.slope");
    return std::make_shared<InclinedRamp>(cfg.take_double("terrain.slope", 0));
  }
  if (kind == "cosine") {
    if (!cfg.has("terrain.amplitude"))
      throw std::invalid_argument("missing config key: terrain.amplitude");
    if (!cfg.has("terrain.period"))
      throw std::invalid_argument("missing config key: terrain.period");
    return std::make_shared<CosineTerrain>(cfg.take_double("terrain.amplitude", 0),
                                           cfg.take_double("terrain.period", 1));
  }
  throw std::invalid_argument("config key terrain.kind: unknown terrain \"" +
                              kind + "\"");
}

inline TerrainPtr build_terrain(ConfigMap& cfg) {
  const std::string kind = cfg.take_string("terrain.kind", "flat");
  const auto plus = kind.find('+');
  if (plus == std::string::npos) return build_terrain_part(kind, cfg);
  TerrainPtr a = build_terrain_part(kind.substr(0, plus), cfg);
  TerrainPtr b = build_terrain_part(kind.substr(plus + 1), cfg);
  return std::make_shared<CompositeTerrain>(std::move(a), std::move(b));
}

inline PathPtr build_path(ConfigMap& cfg, const TerrainPtr& terrain,
                          double t_end) {
  const std::string kind = cfg.take_string("path.kind", "none");
  if (kind == "none") return nullptr;
  if (kind == "line") {
    const Eigen::Vector2d start(cfg.take_double("path.start_x", 0.0),
                                cfg.take_double("path.start_y", 0.0));
    const Eigen::Vector2d dir(cfg.take_double("path.dir_x", 1.0),
                              cfg.take_double("path.dir_y", 0.0));
    const double speed = cfg.take_double("path.speed", 0.25);
    const double duration = cfg.take_double("path.duration", t_end);
    return std::make_shared<StraightLinePath>(terrain, start, dir, speed,
                                              duration);
  }
  if (kind == "circle") {
    const double cx = cfg.take_double("path.cx", 0.0);
    const double cy = cfg.take_double("path.cy", 0.0);
    const double radius = cfg.take_double("path.radius", 1.0);
    const double period = cfg.take_double("path.period", 10.0);
    const double duration = cfg.take_double("path.duration", t_end);
    return std::make_shared<CirclePath>(terrain, cx, cy, radius, period,
                                        duration);
  }
  if (kind == "waypoints") {
    if (!cfg.has("path.points"))
      throw std::invalid_argument("missing config key: path.points");
    const std::string spec = cfg.take_string("path.points", "");
    std::vector<WaypointPath::Waypoint> pts;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ';')) {
      const auto c1 = item.find(':');
      const auto c2 = item.find(':', c1 == std::string::npos ? 0 : c1 + 1);
      if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::invalid_argument(
            "config key path.points: expected t:x:y entries");
      WaypointPath::Waypoint w;
      try {
        w.t = parse_double(item.substr(0, c1));
        w.xy.x() = parse_double(item.substr(c1 + 1, c2 - c1 - 1));
        w.xy.y() = parse_double(item.substr(c2 + 1));
      } catch (const std::exception&) {
        throw std::invalid_argument("config key path.points: bad entry \"" +
                                    item + "\"");
      }
      pts.push_back(w);
    }
    return std::make_shared<WaypointPath>(terrain, std::move(pts));
  }
  throw std::invalid_argument("config key path.kind: unknown path \"" + kind +
                              "\"");
}

inline ModelKind parse_model(const std::string& name) {
  if (name == "3rsr") return ModelKind::ThreeR;
  if (name == "2rsr") return ModelKind::TwoR;
  if (name == "rtsr") return ModelKind::RT;
  throw std::invalid_argument("config key sim.model: unknown model \"" + name +
                              "\" (expected 3rsr, 2rsr or rtsr)");
}

inline const char* model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::ThreeR: return "3rsr";
    case ModelKind::TwoR: return "2rsr";
    case ModelKind::RT: return "rtsr";
  }
  throw std::invalid_argument("model_name: unknown model");
}

}  // namespace detail

/// Builds a SimConfig from parsed key/value pairs. Consumes every key it
/// recognizes and rejects whatever remains.
inline SimConfig build_sim_config(ConfigMap cfg) {
  SimConfig config;

  config.params.radius = cfg.take_double("robot.radius", config.params.radius);
  config.params.mass = cfg.take_double("robot.mass", config.params.mass);
  config.params.lever_arm =
      cfg.take_double("robot.lever_arm", config.params.lever_arm);
  config.params.gravity =
      cfg.take_double("robot.gravity", config.params.gravity);
  config.params.i_body = solid_sphere_inertia(config.params.mass,
                                              config.params.radius);

  config.dt = cfg.take_double("sim.dt", config.dt);
  config.t_end = cfg.take_double("sim.t_end", config.t_end);
  config.model = detail::parse_model(cfg.take_string("sim.model", "3rsr"));
  const std::string coupling = cfg.take_string("sim.coupling", "paper");
  if (coupling == "paper")
    config.coupling = CouplingMode::Paper;
  else if (coupling == "full")
    config.coupling = CouplingMode::FullDerivative;
  else
    throw std::invalid_argument(
        "config key sim.coupling: expected paper or full, got \"" + coupling +
        "\"");
  config.lookahead = cfg.take_double("sim.lookahead", config.lookahead);
  config.control_every = static_cast<int>(
      cfg.take_long("sim.control_every", config.control_every));

  config.gains.k_theta = cfg.take_double("gains.k_theta", config.gains.k_theta);
  config.gains.k_theta1 =
      cfg.take_double("gains.k_theta1", config.gains.k_theta1);
  config.gains.k_theta2 =
      cfg.take_double("gains.k_theta2", config.gains.k_theta2);
  config.gains.k_phi = cfg.take_double("gains.k_phi", config.gains.k_phi);
  config.gains.k_phi1 = cfg.take_double("gains.k_phi1", config.gains.k_phi1);
  config.gains.k_phi2 = cfg.take_double("gains.k_phi2", config.gains.k_phi2);
  config.gains.k_psi = cfg.take_double("gains.k_psi", config.gains.k_psi);
  config.gains.k_e = cfg.take_double("gains.k_e", config.gains.k_e);

  config.terrain = detail::build_terrain(cfg);
  config.path = detail::build_path(cfg, config.terrain, config.t_end);

  config.initial_pose.alpha = cfg.take_double("init.alpha", 0.0);
  config.initial_pose.beta = cfg.take_double("init.beta", 0.0);
  config.initial_pose.gamma = cfg.take_double("init.gamma", 0.0);
  RobotState& s = config.initial_state;
  s.orientation = rot_ypr(config.initial_pose);
  const double x = cfg.take_double("init.x", 0.0);
  const double y = cfg.take_double("init.y", 0.0);
  s.p0 << x, y, config.terrain->elevation(x, y);
  s.psi = cfg.take_double("init.psi", 0.0);
  s.rates << cfg.take_double("init.theta_dot", 0.0),
      cfg.take_double("init.phi_dot", 0.0), cfg.take_double("init.psi_dot", 0.0);
  const double vx = cfg.take_double("init.vx", 0.0);
  const double vy = cfg.take_double("init.vy", 0.0);
  const SurfaceJet jet = surface_jet(*config.terrain, x, y);
  s.v << vx, vy, jet.fx * vx + jet.fy * vy;

  cfg.reject_leftovers();
  config.validate();
  return config;
}

inline SimConfig load_sim_config(std::istream& in,
                                 const std::vector<std::string>& overrides = {}) {
  ConfigMap cfg = ConfigMap::parse(in);
  for (const std::string& kv : overrides) cfg.apply_override(kv);
  return build_sim_config(std::move(cfg));
}

/// Serializes a SimConfig back to config text; reloading the dump rebuilds
/// a bit-identical run. Programmatic torque schedules have no key form and
/// are omitted.
inline std::string dump_sim_config(const SimConfig& config) {
  ConfigMap cfg;
  cfg.set("robot.radius", format_double(config.params.radius));
  cfg.set("robot.mass", format_double(config.params.mass));
  cfg.set("robot.lever_arm", format_double(config.params.lever_arm));
  cfg.set("robot.gravity", format_double(config.params.gravity));

  cfg.set("sim.dt", format_double(config.dt));
  cfg.set("sim.t_end", format_double(config.t_end));
  cfg.set("sim.model", detail::model_name(config.model));
  cfg.set("sim.coupling",
          config.coupling == CouplingMode::Paper ? "paper" : "full");
  cfg.set("sim.lookahead", format_double(config.lookahead));
  cfg.set("sim.control_every", std::to_string(config.control_every));

  cfg.set("gains.k_theta", format_double(config.gains.k_theta));
  cfg.set("gains.k_theta1", format_double(config.gains.k_theta1));
  cfg.set("gains.k_theta2", format_double(config.gains.k_theta2));
  cfg.set("gains.k_phi", format_double(config.gains.k_phi));
  cfg.set("gains.k_phi1", format_double(config.gains.k_phi1));
  cfg.set("gains.k_phi2", format_double(config.gains.k_phi2));
  cfg.set("gains.k_psi", format_double(config.gains.k_psi));
  cfg.set("gains.k_e", format_double(config.gains.k_e));

  std::map<std::string, std::string> keys;
  config.terrain->describe(keys);
  if (config.path) config.path->describe(keys);
  for (const auto& [k, v] : keys) cfg.set(k, v);

  const RobotState& s = config.initial_state;
  cfg.set("init.x", format_double(s.p0.x()));
  cfg.set("init.y", format_double(s.p0.y()));
  cfg.set("init.alpha", format_double(config.initial_pose.alpha));
  cfg.set("init.beta", format_double(config.initial_pose.beta));
  cfg.set("init.gamma", format_double(config.initial_pose.gamma));
  cfg.set("init.psi", format_double(s.psi));
  cfg.set("init.theta_dot", format_double(s.rates(0)));
  cfg.set("init.phi_dot", format_double(s.rates(1)));
  cfg.set("init.psi_dot", format_double(s.rates(2)));
  cfg.set("init.vx", format_double(s.v.x()));
  cfg.set("init.vy", format_double(s.v.y()));
  return cfg.dump();
}

}  // namespace spiros
