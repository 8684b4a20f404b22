#include "crashforge/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "crashforge/errors.hpp"
#include "crashforge/textio.hpp"

namespace crashforge::metrics {

double crush_load_efficiency(const crashsim::CrashTrace& tr) {
  double peak = 0.0;
  double sum = 0.0;
  std::size_t in_contact = 0;
  for (double f : tr.force) {
    if (f > 0.0) {
      sum += f;
      ++in_contact;
      peak = std::max(peak, f);
    }
  }
  if (in_contact == 0 || peak <= 0.0) {
    throw UndefinedMetric("crush load efficiency: force series is all zero");
  }
  return (sum / static_cast<double>(in_contact)) / peak;
}

double energy_absorbed(const crashsim::CrashTrace& tr) {
  if (tr.kinetic_energy.empty()) {
    throw InvalidArgument("energy_absorbed: empty trace");
  }
  double e0 = tr.kinetic_energy.front();
  double ke_min = e0;
  double absorbed_max = 0.0;
  for (std::size_t i = 0; i < tr.kinetic_energy.size(); ++i) {
    ke_min = std::min(ke_min, tr.kinetic_energy[i]);
    absorbed_max = std::max(
        absorbed_max, tr.internal_energy[i] + tr.dissipated_energy[i]);
  }
  double ea = e0 - ke_min;
  if (std::abs(ea - absorbed_max) > 1e-4 * e0 + 1e-12) {
    throw InconsistentTrace(
        "energy_absorbed: KE drop " + fmt_g9(ea) +
        " J disagrees with max(IE + D) " + fmt_g9(absorbed_max) + " J");
  }
  return ea;
}

double intrusion(const crashsim::CrashTrace& tr) {
  if (tr.displacement.empty()) {
    throw InvalidArgument("intrusion: empty trace");
  }
  double peak = *std::max_element(tr.displacement.begin(),
                                  tr.displacement.end());
  return 1000.0 * std::max(0.0, peak);
}

double peak_deceleration(const crashsim::CrashTrace& tr) {
  if (tr.force.size() < 2) {
    throw InvalidArgument("peak_deceleration: need at least 2 samples");
  }
  if (tr.mass <= 0.0) {
    throw InvalidArgument("peak_deceleration: trace carries no mass");
  }
  double peak = *std::max_element(tr.force.begin(), tr.force.end());
  return peak / tr.mass;
}

CrashMetrics extract_metrics(const crashsim::CrashTrace& tr) {
  CrashMetrics m;
  m.cle = crush_load_efficiency(tr);
  m.ea = energy_absorbed(tr);
  m.intrusion = intrusion(tr);
  m.decel = peak_deceleration(tr);
  return m;
}

}  // namespace crashforge::metrics
