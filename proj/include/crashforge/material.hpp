#pragma once

namespace crashforge::crashsim {

// Orthotropic ply card for the enclosure material. Defaults are the
// production crash-model values for the carbon fiber organosheet.
struct MaterialCard {
  double density = 1.8e-6;  // kg/mm^3
  double e1 = 125.0;        // GPa, fiber-parallel modulus
  double e2 = 8.0;          // GPa, fiber-perpendicular modulus
  double g12 = 7.0;         // GPa, in-plane shear modulus
  double nu12 = 0.33;
  double yield_stress = 0.02;          // GPa, initial yield
  double hardening_multiplier = 1.3;
  double hardening_exponent = 0.64;
  double tensile_ultimate_strain = 0.014;
  double ultimate_damage = 0.99;  // in [0,1)

  // Throws InvalidArgument on nonphysical values.
  void validate() const;
};

}  // namespace crashforge::crashsim
