#include <doctest.h>

#include "crashforge/doe.hpp"
#include "crashforge/errors.hpp"
#include "crashforge/oracle.hpp"

using namespace crashforge;
using doe::DesignPoint;

namespace {

DesignPoint point(int a, double b, double c, double d) {
  DesignPoint p;
  p.n_layers = a;
  p.thickness = b;
  p.layer_temp = c;
  p.tool_temp = d;
  return p;
}

}  // namespace

TEST_CASE("reference equations at the hand-derived spot values") {
  metrics::CrashMetrics m = crashsim::reference_oracle(point(8, 0.25, 300, 120));
  // direct evaluation of the closed forms at a=8, b=0.25, c=300, d=120
  CHECK(m.ea == doctest::Approx(1215.0).epsilon(1e-9));
  CHECK(m.intrusion == doctest::Approx(19.30675).epsilon(1e-9));
  CHECK(m.decel == doctest::Approx(10656.12525).epsilon(1e-9));
  CHECK(m.cle == doctest::Approx(411928.0 / 701680.0).epsilon(1e-9));
}

TEST_CASE("absorbed energy at a 16-layer stack") {
  metrics::CrashMetrics m = crashsim::reference_oracle(point(16, 0.25, 300, 120));
  CHECK(m.ea == doctest::Approx(2679.0).epsilon(1e-9));
}

TEST_CASE("the CLE pole raises a singular-input error") {
  // 8c + d = 1088
  CHECK_THROWS_AS(crashsim::reference_oracle(point(8, 0.25, 133, 24)),
                  SingularInput);
}

TEST_CASE("oracle CLE stays within (0,1] over the default DOE") {
  doe::DoeMatrix m = doe::lhs_sample({}, 400, 42);
  for (const DesignPoint& p : m.points) {
    metrics::CrashMetrics mm = crashsim::reference_oracle(p);
    CHECK(mm.cle > 0.0);
    CHECK(mm.cle <= 1.0);
    CHECK(mm.ea >= 0.0);
    CHECK(mm.intrusion >= 0.0);
    CHECK(mm.decel >= 0.0);
  }
}
