#include "crashforge/forming.hpp"

#include <algorithm>
#include <cmath>

#include "crashforge/errors.hpp"
#include "crashforge/textio.hpp"

namespace crashforge::forming {

double cutout_size(const ToolGeometry& geom) {
  double diff = geom.punch_outer_area - geom.sheet_area();
  if (diff < 0.0) {
    throw InvalidGeometry("punch outer area (" + fmt_g9(geom.punch_outer_area) +
                          " mm^2) smaller than sheet area (" +
                          fmt_g9(geom.sheet_area()) + " mm^2)");
  }
  return std::sqrt(diff / 4.0);
}

double feasibility_score(const doe::DesignPoint& p,
                         const FeasibilityWeights& w) {
  double dv = p.punch_velocity - 5.0;
  double gap_short = std::max(0.0, 140.0 - (p.layer_temp - p.tool_temp));
  return w.temp * (p.layer_temp - 240.0) - w.velocity * dv * dv -
         w.stack * (p.total_thickness() - 2.0) - w.temp_gap * gap_short;
}

double shear_knockdown(const doe::DesignPoint& p) {
  auto clamp01 = [](double x) { return std::clamp(x, 0.0, 1.0); };
  constexpr double kMaxShearRad = 20.0 * 3.14159265358979323846 / 180.0;
  double shear = kMaxShearRad * clamp01((p.punch_velocity - 4.0) / 2.5) *
                 clamp01((400.0 - p.layer_temp) / 200.0);
  double c = std::cos(shear);
  return c * c;
}

FormingOutcome forming_feasibility(const doe::DesignPoint& p,
                                   const ToolGeometry& geom,
                                   const FeasibilityWeights& w) {
  FormingOutcome out;
  out.feasibility_score = feasibility_score(p, w);
  out.feasible = out.feasibility_score >= 0.0;
  out.knockdown = shear_knockdown(p);
  out.cutout_size = cutout_size(geom);
  return out;
}

}  // namespace crashforge::forming
