#pragma once

#include "crashforge/doe.hpp"
#include "crashforge/material.hpp"

namespace crashforge::crashsim {

// Effective in-plane Young's modulus (GPa) of the stack: the ply's reduced
// stiffness matrix is rotated to each layup angle, averaged with equal ply
// weights (symmetric stack), and the modulus is recovered from the inverse
// of the averaged stiffness. Quasi-isotropic layups give a rotation-
// invariant result.
double laminate_modulus(const doe::DesignPoint& p, const MaterialCard& mat);

// Same computation for an explicit angle list; laminate_modulus(p, mat)
// uses the four angles of p.orientation.
double laminate_modulus_angles(const double* angles_deg, int n_angles,
                               const MaterialCard& mat);

}  // namespace crashforge::crashsim
