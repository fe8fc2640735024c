#pragma once

#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "spiros/numeric_io.hpp"
#include "spiros/sim.hpp"

namespace spiros {

inline constexpr const char* kTraceHeader =
    "t,x,y,z,alpha,beta,gamma,psi,theta_dot,phi_dot,psi_dot,"
    "tau_x,tau_y,tau_z,e_norm,zeta_dev,energy";

inline void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  out << kTraceHeader << '\n';
  for (const TraceRow& r : trace.rows) {
    const double cols[] = {r.t,       r.x,        r.y,       r.z,
                           r.alpha,   r.beta,     r.gamma,   r.psi,
                           r.theta_dot, r.phi_dot, r.psi_dot, r.tau_x,
                           r.tau_y,   r.tau_z,    r.e_norm,  r.zeta_dev,
                           r.energy};
    for (size_t i = 0; i < std::size(cols); ++i) {
      if (i) out << ',';
      out << format_double(cols[i]);
    }
    out << '\n';
  }
  if (trace.error) out << "# error: " << trace.error_message << '\n';
}

inline void write_trace_csv(const std::string& path, const SimTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace output: " + path);
  write_trace_csv(out, trace);
}

}  // namespace spiros
