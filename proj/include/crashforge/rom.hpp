#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "crashforge/doe.hpp"
#include "crashforge/forming.hpp"
#include "crashforge/material.hpp"

namespace crashforge::crashsim {

// Solver constants of the reduced-order impact model. Everything here is
// overridable through run config; defaults are the shipped calibration.
struct SolverSettings {
  double characteristic_length = 0.254;  // m, rigid-pole diameter
  double width_factor = 6.0;   // m, effective developed shell width
                               // (floor + lid + ribs engaged by the pole)
  double payload_mass = 100.0;  // kg, nonstructural battery mass
  double damping_ratio = 0.01;  // fraction of critical; beta = 2*zeta/omega
  double cfl_fraction = 0.01;   // internal step = cfl * (2/omega)
  double impact_velocity = 9.7222;  // m/s (35 km/h)
  double duration = 1e-2;           // s
  double dt_out = 1e-5;             // s
  // Ramp width of the damage law, as a multiple of the onset strain:
  // damage completes at onset * (1 + ratio).
  double damage_ramp_strain_ratio = 1.0;
  // Contact friction from the crash setup; a normal-impact single-DOF
  // model has no tangential direction, so this is carried for the record
  // and never enters the equations.
  double friction_coefficient = 0.2;
};

// Single-degree-of-freedom idealization of the enclosure side impact:
// lumped mass against a unilateral elasto-plastic-damage resistance.
struct RomModel {
  double mass = 0.0;           // kg, enclosure + payload
  double k_elastic = 0.0;      // N/m, after forming knockdown
  double characteristic_length = 0.254;  // m, strain <-> displacement map
  double section_area = 0.0;   // m^2, smeared load-bearing section
  double yield_force = 0.0;    // N
  double hardening_multiplier = 1.3;
  double hardening_exponent = 0.64;
  double damage_onset_strain = 0.014;
  double damage_full_strain = 0.028;
  double ultimate_damage = 0.99;
  double damping_beta = 0.0;   // s; damping force = beta * k_elastic * xdot
};

// Output time series of one impact. All channels share the same sampling;
// energies are in joules and satisfy KE + IE + dissipated = E0 to the
// solver tolerance at every sample.
struct CrashTrace {
  double dt_out = 1e-5;   // s
  double duration = 1e-2; // s
  double mass = 0.0;      // kg (carried for force -> deceleration mapping)
  std::vector<double> force;              // N
  std::vector<double> displacement;       // m
  std::vector<double> velocity;           // m/s
  std::vector<double> kinetic_energy;     // J
  std::vector<double> internal_energy;    // J
  std::vector<double> dissipated_energy;  // J

  std::size_t size() const { return force.size(); }
  double time(std::size_t i) const { return static_cast<double>(i) * dt_out; }
};

// Assembles the 1-DOF model from a formed design point:
//   mass      = density * sheet area * stack thickness + payload
//   k_elastic = knockdown * E_eff * stack thickness * width_factor / L_char
// with yield and damage displacements mapped from the material strains via
// the characteristic length. All internal quantities are SI.
// Throws ContractViolation when the forming outcome is infeasible.
RomModel build_rom(const doe::DesignPoint& p, const forming::FormingOutcome& f,
                   const MaterialCard& mat, const forming::ToolGeometry& geom,
                   const SolverSettings& s = {});

// Explicit central-difference integration of the model against the rigid
// pole. Elastic up to the yield force, then power-law hardening
// sigma = sigma_y * (1 + multiplier * eps_p^exponent); strain-driven damage
// degrades the elastic slope; stiffness-proportional damping acts while in
// contact; the resistance is compression-only. Energy channels are
// bookkept so KE + IE + D = E0 within 1e-4 * E0 at every output sample
// (violations raise SolverError).
CrashTrace integrate(const RomModel& rom, double v0, double duration,
                     double dt_out, double cfl_fraction = 0.01);

// Trace CSV: t_s,force_N,disp_m,vel_mps,ke_J,ie_J,diss_J
void write_trace_file(const CrashTrace& trace, const std::string& path);

}  // namespace crashforge::crashsim
