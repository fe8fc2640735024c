#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spiros/config.hpp"
#include "spiros/selftest.hpp"
#include "spiros/sim.hpp"
#include "spiros/trace_io.hpp"

namespace {

struct Options {
  std::string output;
  std::string config_path;
  std::string pose;
  std::string model;
  double dt = -1.0;
  double t_end = -1.0;
  std::vector<std::string> sets;
  bool dump_config = false;
};

void add_run_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("-o,--output", opt.output, "trace CSV destination");
  cmd->add_option("--model", opt.model, "dynamics model: 3rsr, 2rsr or rtsr");
  cmd->add_option("--dt", opt.dt, "integrator step, seconds");
  cmd->add_option("--t-end", opt.t_end, "simulated duration, seconds");
  cmd->add_option("--set", opt.sets, "config override, key=value")
      ->take_all();
  cmd->add_flag("--dump-config", opt.dump_config,
                "print the effective config and exit");
}

std::vector<std::string> collect_overrides(const Options& opt) {
  std::vector<std::string> out = opt.sets;
  if (!opt.model.empty()) out.push_back("sim.model=" + opt.model);
  if (opt.dt > 0.0) out.push_back("sim.dt=" + spiros::format_double(opt.dt));
  if (opt.t_end > 0.0)
    out.push_back("sim.t_end=" + spiros::format_double(opt.t_end));
  if (!opt.pose.empty()) {
    std::istringstream in(opt.pose);
    std::string a, b, g;
    if (!std::getline(in, a, ',') || !std::getline(in, b, ',') ||
        !std::getline(in, g))
      throw std::invalid_argument("--pose expects a,b,g in radians");
    out.push_back("init.alpha=" + a);
    out.push_back("init.beta=" + b);
    out.push_back("init.gamma=" + g);
  }
  return out;
}

spiros::SimConfig apply_overrides(const spiros::SimConfig& base,
                                  const Options& opt) {
  spiros::ConfigMap cfg = spiros::ConfigMap::parse(spiros::dump_sim_config(base));
  for (const std::string& kv : collect_overrides(opt)) cfg.apply_override(kv);
  return spiros::build_sim_config(std::move(cfg));
}

int run_and_report(const spiros::SimConfig& config, const Options& opt) {
  if (opt.dump_config) {
    std::cout << spiros::dump_sim_config(config);
    return 0;
  }

  const auto start = std::chrono::steady_clock::now();
  const spiros::SimTrace trace = spiros::run(config);
  const std::chrono::duration<double> wall =
      std::chrono::steady_clock::now() - start;

  if (!opt.output.empty()) spiros::write_trace_csv(opt.output, trace);

  if (trace.rows.empty()) {
    std::cerr << "simulation error: " << trace.error_message << "\n";
    return 2;
  }
  const spiros::TraceRow& last = trace.rows.back();
  double sq_err = 0.0, max_defect = 0.0;
  for (const spiros::TraceRow& r : trace.rows) {
    sq_err += r.e_norm * r.e_norm;
    max_defect = std::max(
        max_defect, std::abs(r.z - config.terrain->elevation(r.x, r.y)));
  }
  const double rms = std::sqrt(sq_err / trace.rows.size());

  std::printf("final position: (%.6f, %.6f, %.6f)\n", last.x, last.y, last.z);
  std::printf("rms tracking error: %.6f m\n", rms);
  std::printf("max constraint defect: %.3e m\n", max_defect);
  std::printf("wall time: %.3f s\n", wall.count());
  if (trace.error) {
    std::cerr << "simulation error: " << trace.error_message << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SPIROS rolling-dynamics simulator"};
  app.require_subcommand(1);

  Options ramp_opt, circle_opt, run_opt;
  unsigned seed = 42;

  CLI::App* ramp = app.add_subcommand("ramp", "ramp-ascent scenario");
  add_run_flags(ramp, ramp_opt);
  ramp->add_option("--pose", ramp_opt.pose, "initial pose a,b,g in radians");

  CLI::App* circle = app.add_subcommand("circle", "circular-tracking scenario");
  add_run_flags(circle, circle_opt);

  CLI::App* runc = app.add_subcommand("run", "run a user config");
  add_run_flags(runc, run_opt);
  runc->add_option("--config", run_opt.config_path, "config file path")
      ->required();
  runc->add_option("--pose", run_opt.pose, "initial pose a,b,g in radians");

  CLI::App* check = app.add_subcommand("check", "invariant self-test suite");
  check->add_option("--seed", seed, "random seed for the property suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ramp->parsed())
      return run_and_report(
          apply_overrides(spiros::scenario_ramp({0, 0, 0}), ramp_opt), ramp_opt);
    if (circle->parsed())
      return run_and_report(apply_overrides(spiros::scenario_circle(), circle_opt),
                            circle_opt);
    if (runc->parsed()) {
      std::ifstream in(run_opt.config_path);
      if (!in) {
        std::cerr << "config error: cannot open " << run_opt.config_path << "\n";
        return 1;
      }
      spiros::ConfigMap cfg = spiros::ConfigMap::parse(in);
      for (const std::string& kv : collect_overrides(run_opt))
        cfg.apply_override(kv);
      return run_and_report(spiros::build_sim_config(std::move(cfg)), run_opt);
    }
    if (check->parsed()) {
      const auto results = spiros::run_self_tests(seed);
      bool all = true;
      for (const auto& r : results) {
        std::printf("%-40s %s  (%s)\n", r.name.c_str(),
                    r.passed ? "pass" : "FAIL", r.detail.c_str());
        all = all && r.passed;
      }
      return all ? 0 : 1;
    }
  } catch (const std::invalid_argument& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "simulation error: " << ex.what() << "\n";
    return 2;
  }
  return 1;
}
