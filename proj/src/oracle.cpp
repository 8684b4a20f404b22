#include "crashforge/oracle.hpp"

#include <cmath>

#include "crashforge/errors.hpp"
#include "crashforge/textio.hpp"

namespace crashforge::crashsim {

metrics::CrashMetrics reference_oracle(const doe::DesignPoint& p) {
  double a = static_cast<double>(p.n_layers);
  double b = p.thickness;
  double c = p.layer_temp;
  double d = p.tool_temp;

  double den = 490.0 * (-1088.0 + 8.0 * c + d);
  if (den == 0.0) {
    throw SingularInput("reference_oracle: CLE pole at 8c + d = 1088 (c=" +
                        fmt_g9(c) + ", d=" + fmt_g9(d) + ")");
  }

  metrics::CrashMetrics m;
  m.cle = (-297024.0 + 2184.0 * c + 273.0 * d - 272.0 * a * a +
           2.0 * c * a * a) /
          den;
  m.ea = 1303.0 + 8.0 * a * a * b * b * b * (-33.0 + (3.0 + a) * b * a);
  m.intrusion = -0.692 * a * b + 0.390 * a + 1.819 * b + 17.116;
  m.decel = 136.585 * a - 1874.219 * b + 10032.0;
  return m;
}

}  // namespace crashforge::crashsim
