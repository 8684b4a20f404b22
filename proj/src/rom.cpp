#include "crashforge/rom.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crashforge/errors.hpp"
#include "crashforge/laminate.hpp"
#include "crashforge/textio.hpp"

namespace crashforge::crashsim {

RomModel build_rom(const doe::DesignPoint& p, const forming::FormingOutcome& f,
                   const MaterialCard& mat, const forming::ToolGeometry& geom,
                   const SolverSettings& s) {
  if (!f.feasible) {
    throw ContractViolation("build_rom: forming outcome is infeasible");
  }
  mat.validate();
  if (!(f.knockdown > 0.0 && f.knockdown <= 1.0)) {
    throw InvalidArgument("knockdown must lie in (0, 1]");
  }

  double stack_mm = p.total_thickness();          // mm
  double stack_m = stack_mm * 1e-3;               // m
  double sheet_area_mm2 = geom.sheet_area();      // mm^2
  double e_eff_pa = laminate_modulus(p, mat) * 1e9;

  RomModel rom;
  rom.mass = mat.density * sheet_area_mm2 * stack_mm + s.payload_mass;
  rom.characteristic_length = s.characteristic_length;
  rom.section_area = stack_m * s.width_factor;
  rom.k_elastic =
      f.knockdown * e_eff_pa * rom.section_area / s.characteristic_length;
  rom.yield_force = mat.yield_stress * 1e9 * rom.section_area;
  rom.hardening_multiplier = mat.hardening_multiplier;
  rom.hardening_exponent = mat.hardening_exponent;
  rom.damage_onset_strain = mat.tensile_ultimate_strain;
  rom.damage_full_strain =
      mat.tensile_ultimate_strain * (1.0 + s.damage_ramp_strain_ratio);
  rom.ultimate_damage = mat.ultimate_damage;

  double omega = std::sqrt(rom.k_elastic / rom.mass);
  rom.damping_beta = 2.0 * s.damping_ratio / omega;
  return rom;
}

namespace {

// Material state of the 1-DOF resistance during integration.
struct ContactState {
  double plastic_strain = 0.0;
  double max_strain = 0.0;
  double damage = 0.0;
};

struct ForceResult {
  double total = 0.0;   // applied to the mass (>= 0)
  double spring = 0.0;  // constitutive part
  double stored = 0.0;  // recoverable elastic energy, J
};

double flow_force(const RomModel& rom, double eps_p) {
  return rom.yield_force *
         (1.0 + rom.hardening_multiplier *
                    std::pow(eps_p, rom.hardening_exponent));
}

// Updates plastic/damage state for displacement x and returns the contact
// force. Velocity enters only through the damping term.
ForceResult contact_force(const RomModel& rom, double x, double v,
                          ContactState& st) {
  ForceResult out;
  double length = rom.characteristic_length;
  double eps = x / length;

  if (eps > st.max_strain) {
    st.max_strain = eps;
    if (st.max_strain > rom.damage_onset_strain) {
      double ramp = (st.max_strain - rom.damage_onset_strain) /
                    (rom.damage_full_strain - rom.damage_onset_strain);
      st.damage = std::min(rom.ultimate_damage,
                           rom.ultimate_damage * std::min(1.0, ramp));
    }
  }

  double k_d = (1.0 - st.damage) * rom.k_elastic;
  double f_trial = k_d * (x - st.plastic_strain * length);
  if (f_trial <= 0.0) {
    return out;  // out of contact, no tension
  }

  double f_spring = f_trial;
  double f_flow = flow_force(rom, st.plastic_strain);
  if (f_trial > f_flow) {
    // Plastic return: find deps >= 0 with
    //   k_d * (x - (eps_p + deps) * L) = flow(eps_p + deps).
    // The residual is strictly decreasing in deps, so bisection on
    // [0, eps_el] is safe even at the power-law's singular slope at 0.
    double lo = 0.0;
    double hi = x / length - st.plastic_strain;
    for (int iter = 0; iter < 64; ++iter) {
      double mid = 0.5 * (lo + hi);
      double lhs = k_d * (x - (st.plastic_strain + mid) * length);
      double rhs = flow_force(rom, st.plastic_strain + mid);
      if (lhs > rhs) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    st.plastic_strain += 0.5 * (lo + hi);
    f_spring = flow_force(rom, st.plastic_strain);
  }

  out.spring = f_spring;
  out.stored = 0.5 * f_spring * f_spring / k_d;
  double f_damp = rom.damping_beta * rom.k_elastic * v;
  out.total = std::max(0.0, f_spring + f_damp);
  return out;
}

}  // namespace

CrashTrace integrate(const RomModel& rom, double v0, double duration,
                     double dt_out, double cfl_fraction) {
  if (!(duration > 0.0) || !(dt_out > 0.0)) {
    throw InvalidArgument("integrate: duration and dt_out must be positive");
  }
  if (!(cfl_fraction > 0.0 && cfl_fraction <= 0.5)) {
    throw InvalidArgument("integrate: cfl_fraction must lie in (0, 0.5]");
  }
  if (rom.mass <= 0.0 || rom.k_elastic <= 0.0) {
    throw InvalidArgument("integrate: model needs positive mass and stiffness");
  }
  if (v0 < 0.0) throw InvalidArgument("integrate: v0 must be nonnegative");

  std::size_t n_out = static_cast<std::size_t>(std::llround(duration / dt_out));
  double omega = std::sqrt(rom.k_elastic / rom.mass);
  double dt_target = cfl_fraction * 2.0 / omega;
  // at least 4 substeps per output sample: contact entry/exit quantization
  // scales with h^2 and must stay well under the balance tolerance
  std::size_t substeps =
      std::max<std::size_t>(4, static_cast<std::size_t>(
                                   std::ceil(dt_out / dt_target)));
  double h = dt_out / static_cast<double>(substeps);

  CrashTrace tr;
  tr.dt_out = dt_out;
  tr.duration = duration;
  tr.mass = rom.mass;
  tr.force.reserve(n_out + 1);
  tr.displacement.reserve(n_out + 1);
  tr.velocity.reserve(n_out + 1);
  tr.kinetic_energy.reserve(n_out + 1);
  tr.internal_energy.reserve(n_out + 1);
  tr.dissipated_energy.reserve(n_out + 1);

  ContactState st;
  double x = 0.0;
  double v = v0;
  double dissipated = 0.0;
  double e0 = 0.5 * rom.mass * v0 * v0;
  ForceResult fr = contact_force(rom, x, v, st);

  auto record = [&](std::size_t sample_index) {
    double ke = 0.5 * rom.mass * v * v;
    tr.force.push_back(fr.total);
    tr.displacement.push_back(x);
    tr.velocity.push_back(v);
    tr.kinetic_energy.push_back(ke);
    tr.internal_energy.push_back(fr.stored);
    tr.dissipated_energy.push_back(dissipated);
    double residual = std::abs(ke + fr.stored + dissipated - e0);
    if (residual > 1e-4 * e0 + 1e-12) {
      throw SolverError("energy balance violated at t=" +
                        fmt_g9(static_cast<double>(sample_index) * dt_out) +
                        " s: residual " + fmt_g9(residual) + " J vs E0 " +
                        fmt_g9(e0) + " J");
    }
  };

  record(0);
  for (std::size_t i = 1; i <= n_out; ++i) {
    for (std::size_t s = 0; s < substeps; ++s) {
      double a = -fr.total / rom.mass;
      double v_half = v + 0.5 * h * a;
      double x_new = x + h * v_half;
      double stored_old = fr.stored;
      double f_old = fr.total;
      ForceResult fr_new = contact_force(rom, x_new, v_half, st);
      double a_new = -fr_new.total / rom.mass;
      double v_new = v_half + 0.5 * h * a_new;
      // Dissipation (plastic + damage + damping) as the work of the
      // applied force minus the change in recoverable energy; contact
      // entry/exit quantization can leave a vanishing negative sliver,
      // floored away below.
      double work = 0.5 * (f_old + fr_new.total) * (x_new - x);
      dissipated = std::max(0.0, dissipated + work -
                                     (fr_new.stored - stored_old));
      x = x_new;
      v = v_new;
      fr = fr_new;
    }
    record(i);
  }
  return tr;
}

void write_trace_file(const CrashTrace& trace, const std::string& path) {
  std::ostringstream ss;
  ss << "t_s,force_N,disp_m,vel_mps,ke_J,ie_J,diss_J\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    ss << fmt_g9(trace.time(i)) << ',' << fmt_g9(trace.force[i]) << ','
       << fmt_g9(trace.displacement[i]) << ',' << fmt_g9(trace.velocity[i])
       << ',' << fmt_g9(trace.kinetic_energy[i]) << ','
       << fmt_g9(trace.internal_energy[i]) << ','
       << fmt_g9(trace.dissipated_energy[i]) << "\n";
  }
  write_file(path, ss.str());
}

}  // namespace crashforge::crashsim
