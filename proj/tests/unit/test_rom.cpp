#include <doctest.h>

#include <cmath>
#include <fstream>

#include "crashforge/doe.hpp"
#include "crashforge/errors.hpp"
#include "crashforge/forming.hpp"
#include "crashforge/laminate.hpp"
#include "crashforge/metrics.hpp"
#include "crashforge/rom.hpp"

using namespace crashforge;
using crashsim::CrashTrace;
using crashsim::MaterialCard;
using crashsim::RomModel;
using crashsim::SolverSettings;
using doe::DesignPoint;

namespace {

forming::FormingOutcome formed_outcome(double knockdown = 1.0) {
  forming::FormingOutcome f;
  f.feasible = true;
  f.knockdown = knockdown;
  f.feasibility_score = 1.0;
  f.cutout_size = 105.0;
  return f;
}

// Purely elastic model (yield far above reach, no damping, no damage).
RomModel elastic_model(double mass, double k) {
  RomModel rom;
  rom.mass = mass;
  rom.k_elastic = k;
  rom.characteristic_length = 0.254;
  rom.section_area = 0.01;
  rom.yield_force = 1e15;
  rom.damage_onset_strain = 1e9;
  rom.damage_full_strain = 2e9;
  rom.damping_beta = 0.0;
  return rom;
}

double max_energy_residual(const CrashTrace& tr) {
  double e0 = tr.kinetic_energy.front();
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    double r = std::abs(tr.kinetic_energy[i] + tr.internal_energy[i] +
                        tr.dissipated_energy[i] - e0);
    worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace

TEST_CASE("build_rom mass bookkeeping") {
  DesignPoint p;  // 8 layers of 0.25 mm
  MaterialCard mat;
  forming::ToolGeometry geom;

  SUBCASE("production point: 5.6808 kg of enclosure plus payload") {
    RomModel rom = crashsim::build_rom(p, formed_outcome(), mat, geom);
    CHECK(rom.mass == doctest::Approx(105.6808).epsilon(1e-12));
  }
  SUBCASE("doubling thickness doubles the enclosure contribution") {
    RomModel r1 = crashsim::build_rom(p, formed_outcome(), mat, geom);
    DesignPoint p2 = p;
    p2.thickness = 0.5;
    RomModel r2 = crashsim::build_rom(p2, formed_outcome(), mat, geom);
    CHECK(r2.mass - 100.0 == doctest::Approx(2.0 * (r1.mass - 100.0)));
  }
  SUBCASE("mass always exceeds the payload") {
    RomModel rom = crashsim::build_rom(p, formed_outcome(), mat, geom);
    CHECK(rom.mass > 100.0);
  }
}

TEST_CASE("build_rom stiffness is linear in the knockdown") {
  DesignPoint p;
  MaterialCard mat;
  forming::ToolGeometry geom;
  RomModel full = crashsim::build_rom(p, formed_outcome(1.0), mat, geom);
  RomModel knocked = crashsim::build_rom(p, formed_outcome(0.883), mat, geom);
  CHECK(knocked.k_elastic / full.k_elastic ==
        doctest::Approx(0.883).epsilon(1e-12));
}

TEST_CASE("build_rom matches the spelled-out stiffness formula") {
  DesignPoint p;
  MaterialCard mat;
  forming::ToolGeometry geom;
  SolverSettings s;
  RomModel rom = crashsim::build_rom(p, formed_outcome(0.9), mat, geom, s);
  double e_pa = crashsim::laminate_modulus(p, mat) * 1e9;
  double t_total_m = p.total_thickness() * 1e-3;
  double expected =
      0.9 * e_pa * t_total_m * s.width_factor / s.characteristic_length;
  CHECK(rom.k_elastic == doctest::Approx(expected).epsilon(1e-12));
  CHECK(rom.yield_force ==
        doctest::Approx(mat.yield_stress * 1e9 * t_total_m * s.width_factor));
  CHECK(rom.damage_onset_strain == doctest::Approx(0.014));
}

TEST_CASE("build_rom rejects infeasible forming outcomes") {
  DesignPoint p;
  forming::FormingOutcome f = formed_outcome();
  f.feasible = false;
  CHECK_THROWS_AS(
      crashsim::build_rom(p, f, MaterialCard{}, forming::ToolGeometry{}),
      ContractViolation);
}

TEST_CASE("integrate argument validation") {
  RomModel rom = elastic_model(100.0, 1e8);
  CHECK_THROWS_AS(crashsim::integrate(rom, 9.7222, 0.0, 1e-5),
                  InvalidArgument);
  CHECK_THROWS_AS(crashsim::integrate(rom, 9.7222, 1e-2, -1e-5),
                  InvalidArgument);
  CHECK_THROWS_AS(crashsim::integrate(rom, -1.0, 1e-2, 1e-5),
                  InvalidArgument);
}

TEST_CASE("rest stays at rest") {
  RomModel rom = elastic_model(100.0, 1e8);
  CrashTrace tr = crashsim::integrate(rom, 0.0, 1e-2, 1e-5);
  REQUIRE(tr.size() == 1001);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(tr.force[i] == 0.0);
    CHECK(tr.displacement[i] == 0.0);
    CHECK(tr.kinetic_energy[i] == 0.0);
    CHECK(tr.internal_energy[i] == 0.0);
    CHECK(tr.dissipated_energy[i] == 0.0);
  }
}

TEST_CASE("trace shape invariants") {
  RomModel rom = elastic_model(105.0, 2e8);
  CrashTrace tr = crashsim::integrate(rom, 9.7222, 1e-2, 1e-5);
  CHECK(tr.size() == 1001);  // 10 ms at 0.01 ms cadence
  CHECK(tr.displacement[0] == 0.0);
  CHECK(tr.kinetic_energy[0] ==
        doctest::Approx(0.5 * 105.0 * 9.7222 * 9.7222));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(tr.kinetic_energy[i] >= 0.0);
    CHECK(tr.internal_energy[i] >= 0.0);
    CHECK(tr.dissipated_energy[i] >= -1e-9);
  }
}

TEST_CASE("undamped elastic impact matches the closed-form half-sine") {
  double mass = 105.0;
  double k = 2e8;
  double v0 = 9.7222;
  RomModel rom = elastic_model(mass, k);
  CrashTrace tr = crashsim::integrate(rom, v0, 1e-2, 1e-6, 0.01);

  double peak = 0.0;
  std::size_t contact_samples = 0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    peak = std::max(peak, tr.force[i]);
    if (tr.force[i] > 0.0) ++contact_samples;
  }
  double peak_exact = v0 * std::sqrt(k * mass);
  double contact_exact = M_PI * std::sqrt(mass / k);
  CHECK(std::abs(peak - peak_exact) / peak_exact < 1e-3);
  CHECK(std::abs(contact_samples * tr.dt_out - contact_exact) /
            contact_exact <
        1e-3);

  // peak displacement closed form: v0 * sqrt(m/k)
  double xmax = 0.0;
  for (double x : tr.displacement) xmax = std::max(xmax, x);
  CHECK(xmax == doctest::Approx(v0 * std::sqrt(mass / k)).epsilon(1e-3));

  // elastic bounce returns the kinetic energy
  CHECK(tr.kinetic_energy.back() ==
        doctest::Approx(tr.kinetic_energy.front()).epsilon(1e-4));
}

TEST_CASE("energy balance holds through yield, damage and damping") {
  DesignPoint p;
  MaterialCard mat;
  forming::ToolGeometry geom;
  SolverSettings s;
  forming::FormingOutcome f = formed_outcome(0.95);
  RomModel rom = crashsim::build_rom(p, f, mat, geom, s);
  CrashTrace tr = crashsim::integrate(rom, s.impact_velocity, s.duration,
                                      s.dt_out, s.cfl_fraction);
  double e0 = tr.kinetic_energy.front();
  CHECK(max_energy_residual(tr) <= 1e-4 * e0);
  // production point dissipates energy and bounces back
  CHECK(tr.kinetic_energy.back() < e0);
  CHECK(tr.dissipated_energy.back() > 0.0);
}

TEST_CASE("contact unilaterality") {
  DesignPoint p;
  p.n_layers = 6;
  p.thickness = 0.2;
  RomModel rom = crashsim::build_rom(p, formed_outcome(0.9), MaterialCard{},
                                     forming::ToolGeometry{});
  CrashTrace tr = crashsim::integrate(rom, 9.7222, 1e-2, 1e-5);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(tr.force[i] >= 0.0);
  }
}

TEST_CASE("grid convergence: halving the internal step") {
  DesignPoint p;
  RomModel rom = crashsim::build_rom(p, formed_outcome(), MaterialCard{},
                                     forming::ToolGeometry{});
  CrashTrace a = crashsim::integrate(rom, 9.7222, 1e-2, 1e-5, 0.01);
  CrashTrace b = crashsim::integrate(rom, 9.7222, 1e-2, 1e-5, 0.005);
  double pa = 0.0, pb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa = std::max(pa, a.force[i]);
    pb = std::max(pb, b.force[i]);
  }
  CHECK(std::abs(pa - pb) / pa < 0.005);
}

TEST_CASE("trace csv writing") {
  RomModel rom = elastic_model(100.0, 1e8);
  CrashTrace tr = crashsim::integrate(rom, 5.0, 1e-3, 1e-5);
  crashsim::write_trace_file(tr, "/tmp/crashforge_test_trace.csv");
  std::ifstream in("/tmp/crashforge_test_trace.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "t_s,force_N,disp_m,vel_mps,ke_J,ie_J,diss_J");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == tr.size());
}
