#pragma once

#include "crashforge/rom.hpp"

namespace crashforge::metrics {

// The four crashworthiness targets.
struct CrashMetrics {
  double cle = 0.0;        // crush load efficiency, in (0,1]
  double ea = 0.0;         // energy absorbed, J
  double intrusion = 0.0;  // mm
  double decel = 0.0;      // peak deceleration, m/s^2
};

// Mean contact-phase force (samples with force > 0) over peak force.
// Throws UndefinedMetric on an all-zero force series.
double crush_load_efficiency(const crashsim::CrashTrace& tr);

// Drop in kinetic energy, KE[0] - min KE. Cross-checked against
// max(IE + dissipated); disagreement beyond 1e-4 * E0 raises
// InconsistentTrace.
double energy_absorbed(const crashsim::CrashTrace& tr);

// Peak displacement, in millimeters.
double intrusion(const crashsim::CrashTrace& tr);

// Peak force / mass. (Differentiating the sampled velocity would add
// noise; on smooth traces both agree within a few percent.)
double peak_deceleration(const crashsim::CrashTrace& tr);

CrashMetrics extract_metrics(const crashsim::CrashTrace& tr);

}  // namespace crashforge::metrics
