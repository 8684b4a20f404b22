#include "crashforge/laminate.hpp"

#include <array>
#include <cmath>

#include "crashforge/errors.hpp"

namespace crashforge::crashsim {

void MaterialCard::validate() const {
  if (density <= 0.0) throw InvalidArgument("density must be positive");
  if (e1 <= 0.0 || e2 <= 0.0 || g12 <= 0.0) {
    throw InvalidArgument("moduli must be positive");
  }
  if (!(nu12 > 0.0 && nu12 < 0.5)) {
    throw InvalidArgument("nu12 must lie in (0, 0.5)");
  }
  if (yield_stress <= 0.0) throw InvalidArgument("yield stress must be positive");
  if (tensile_ultimate_strain <= 0.0) {
    throw InvalidArgument("ultimate strain must be positive");
  }
  if (!(ultimate_damage >= 0.0 && ultimate_damage < 1.0)) {
    throw InvalidArgument("ultimate damage must lie in [0, 1)");
  }
}

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

// Plane-stress reduced stiffness of the ply in material axes.
Mat3 reduced_stiffness(const MaterialCard& m) {
  double nu21 = m.nu12 * m.e2 / m.e1;
  double den = 1.0 - m.nu12 * nu21;
  Mat3 q{};
  q[0][0] = m.e1 / den;
  q[1][1] = m.e2 / den;
  q[0][1] = q[1][0] = m.nu12 * m.e2 / den;
  q[2][2] = m.g12;
  return q;
}

// Qbar: reduced stiffness rotated by theta (standard CLT transformation).
Mat3 rotated_stiffness(const Mat3& q, double theta_rad) {
  double c = std::cos(theta_rad);
  double s = std::sin(theta_rad);
  double c2 = c * c, s2 = s * s, c4 = c2 * c2, s4 = s2 * s2;
  double sc = s * c;
  double q11 = q[0][0], q12 = q[0][1], q22 = q[1][1], q66 = q[2][2];
  Mat3 r{};
  r[0][0] = q11 * c4 + 2.0 * (q12 + 2.0 * q66) * s2 * c2 + q22 * s4;
  r[0][1] = (q11 + q22 - 4.0 * q66) * s2 * c2 + q12 * (s4 + c4);
  r[1][1] = q11 * s4 + 2.0 * (q12 + 2.0 * q66) * s2 * c2 + q22 * c4;
  r[0][2] = (q11 - q12 - 2.0 * q66) * sc * c2 + (q12 - q22 + 2.0 * q66) * sc * s2;
  r[1][2] = (q11 - q12 - 2.0 * q66) * sc * s2 + (q12 - q22 + 2.0 * q66) * sc * c2;
  r[2][2] = (q11 + q22 - 2.0 * q12 - 2.0 * q66) * s2 * c2 + q66 * (s4 + c4);
  r[1][0] = r[0][1];
  r[2][0] = r[0][2];
  r[2][1] = r[1][2];
  return r;
}

// Inverse of a symmetric 3x3 via cofactors.
Mat3 invert3(const Mat3& a) {
  double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
               a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (std::abs(det) < 1e-300) {
    throw InvalidArgument("singular laminate stiffness matrix");
  }
  Mat3 inv{};
  inv[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
  inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
  inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
  inv[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
  inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
  inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
  inv[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
  inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
  inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
  return inv;
}

}  // namespace

double laminate_modulus_angles(const double* angles_deg, int n_angles,
                               const MaterialCard& mat) {
  mat.validate();
  if (n_angles <= 0) throw InvalidArgument("laminate needs at least one ply");
  Mat3 q = reduced_stiffness(mat);
  Mat3 avg{};
  for (int i = 0; i < n_angles; ++i) {
    Mat3 r = rotated_stiffness(q, angles_deg[i] * 3.14159265358979323846 / 180.0);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) avg[a][b] += r[a][b] / n_angles;
  }
  Mat3 compliance = invert3(avg);
  return 1.0 / compliance[0][0];
}

double laminate_modulus(const doe::DesignPoint& p, const MaterialCard& mat) {
  std::array<double, 4> angles = doe::layup_angles_deg(p.orientation);
  return laminate_modulus_angles(angles.data(), 4, mat);
}

}  // namespace crashforge::crashsim
