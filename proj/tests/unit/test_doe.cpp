#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <vector>

#include "crashforge/doe.hpp"
#include "crashforge/errors.hpp"

using namespace crashforge;
using doe::DesignPoint;
using doe::DoeMatrix;
using doe::Orientation;
using doe::ParameterSpace;

namespace {

// Pulls the per-variable columns back out of a matrix for the
// stratification checks.
std::vector<double> column(const DoeMatrix& m, int var) {
  std::vector<double> out;
  for (const DesignPoint& p : m.points) {
    switch (var) {
      case 0: out.push_back(p.thickness); break;
      case 1: out.push_back(p.punch_velocity); break;
      case 2: out.push_back(p.layer_temp); break;
      case 3: out.push_back(p.tool_temp); break;
      default: out.push_back(p.air_temp); break;
    }
  }
  return out;
}

doe::Interval interval_of(const ParameterSpace& s, int var) {
  switch (var) {
    case 0: return s.thickness;
    case 1: return s.punch_velocity;
    case 2: return s.layer_temp;
    case 3: return s.tool_temp;
    default: return s.air_temp;
  }
}

// One sample per equal-width stratum, for every continuous variable.
void check_stratification(const DoeMatrix& m) {
  std::size_t n = m.points.size();
  for (int var = 0; var < 5; ++var) {
    doe::Interval iv = interval_of(m.space, var);
    std::vector<double> vals = column(m, var);
    std::vector<int> counts(n, 0);
    for (double v : vals) {
      double u = (v - iv.lo) / iv.width();
      auto stratum = static_cast<std::size_t>(u * static_cast<double>(n));
      if (stratum >= n) stratum = n - 1;
      counts[stratum]++;
    }
    for (std::size_t s = 0; s < n; ++s) {
      CAPTURE(var);
      CAPTURE(s);
      CHECK(counts[s] == 1);
    }
  }
}

}  // namespace

TEST_CASE("default space matches the production ranges") {
  ParameterSpace s;
  CHECK(s.n_layers_min == 4);
  CHECK(s.n_layers_max == 16);
  CHECK(s.layer_bin_count() == 7);
  CHECK(s.thickness.lo == doctest::Approx(0.1));
  CHECK(s.thickness.hi == doctest::Approx(0.6));
  CHECK(s.punch_velocity.lo == doctest::Approx(4.0));
  CHECK(s.punch_velocity.hi == doctest::Approx(6.5));
  CHECK(s.layer_temp.lo == doctest::Approx(200.0));
  CHECK(s.layer_temp.hi == doctest::Approx(400.0));
  CHECK(s.tool_temp.lo == doctest::Approx(20.0));
  CHECK(s.tool_temp.hi == doctest::Approx(220.0));
  CHECK(s.air_temp.lo == doctest::Approx(10.0));
  CHECK(s.air_temp.hi == doctest::Approx(30.0));
  CHECK(s.orientation_sets == std::vector<std::string>{"A", "B"});
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("snap maps latent endpoints onto bins and intervals") {
  ParameterSpace s;
  std::array<double, 7> latents{};

  SUBCASE("layer bins") {
    latents[0] = 0.0;
    CHECK(doe::snap(latents, s).n_layers == 4);
    latents[0] = 0.999;
    CHECK(doe::snap(latents, s).n_layers == 16);
  }
  SUBCASE("orientation threshold: 0.5 falls to B") {
    latents[2] = 0.49;
    CHECK(doe::snap(latents, s).orientation == Orientation::A);
    latents[2] = 0.5;
    CHECK(doe::snap(latents, s).orientation == Orientation::B);
  }
  SUBCASE("continuous midpoint") {
    latents[1] = 0.5;
    CHECK(doe::snap(latents, s).thickness == doctest::Approx(0.35));
  }
  SUBCASE("latent out of range") {
    latents[4] = 1.0;
    CHECK_THROWS_AS(doe::snap(latents, s), InvalidArgument);
    latents[4] = -0.01;
    CHECK_THROWS_AS(doe::snap(latents, s), InvalidArgument);
  }
}

TEST_CASE("lhs_sample rejects n = 0 and allows degenerate intervals") {
  ParameterSpace s;
  CHECK_THROWS_AS(doe::lhs_sample(s, 0, 1), InvalidArgument);

  s.air_temp = {15.0, 15.0};
  DoeMatrix m = doe::lhs_sample(s, 8, 3);
  for (const DesignPoint& p : m.points) {
    CHECK(p.air_temp == doctest::Approx(15.0));
  }
}

TEST_CASE("lhs_sample: single point lies inside every interval") {
  DoeMatrix m = doe::lhs_sample({}, 1, 7);
  REQUIRE(m.points.size() == 1);
  CHECK_NOTHROW(m.points[0].validate(m.space));
}

TEST_CASE("lhs stratification and marginal bounds for n in {1,4,50,400}") {
  for (std::size_t n : {1u, 4u, 50u, 400u}) {
    CAPTURE(n);
    DoeMatrix m = doe::lhs_sample({}, n, 42);
    REQUIRE(m.points.size() == n);
    check_stratification(m);
    for (const DesignPoint& p : m.points) CHECK_NOTHROW(p.validate(m.space));
  }
}

TEST_CASE("even-layer law over a large sample") {
  DoeMatrix m = doe::lhs_sample({}, 400, 17);
  for (const DesignPoint& p : m.points) {
    CHECK(p.n_layers % 2 == 0);
    CHECK(p.n_layers >= 4);
    CHECK(p.n_layers <= 16);
  }
}

TEST_CASE("seed determinism and seed sensitivity") {
  DoeMatrix a = doe::lhs_sample({}, 400, 42);
  DoeMatrix b = doe::lhs_sample({}, 400, 42);
  CHECK(a.points == b.points);

  std::ostringstream sa, sb;
  doe::write_doe(a, sa);
  doe::write_doe(b, sb);
  CHECK(sa.str() == sb.str());  // byte-identical

  DoeMatrix c = doe::lhs_sample({}, 400, 43);
  CHECK(a.points != c.points);
}

TEST_CASE("doe csv round trip") {
  DoeMatrix m = doe::lhs_sample({}, 25, 11);
  std::ostringstream out;
  doe::write_doe(m, out);

  std::istringstream in(out.str());
  DoeMatrix r = doe::read_doe(in);
  CHECK(r.seed == m.seed);
  REQUIRE(r.points.size() == m.points.size());

  // after one write/read cycle the matrix is a fixed point of persistence
  std::ostringstream out2;
  doe::write_doe(r, out2);
  std::istringstream in2(out2.str());
  DoeMatrix r2 = doe::read_doe(in2);
  CHECK(r.points == r2.points);
  CHECK(out2.str() == [&] {
    std::ostringstream s3;
    doe::write_doe(r2, s3);
    return s3.str();
  }());

  // values representable at 6 significant digits survive exactly
  DoeMatrix exact;
  exact.seed = 5;
  DesignPoint p;
  p.n_layers = 10;
  p.thickness = 0.35;
  p.orientation = Orientation::B;
  p.punch_velocity = 5.25;
  p.layer_temp = 312.5;
  p.tool_temp = 120.0;
  p.air_temp = 22.5;
  exact.points.push_back(p);
  std::ostringstream eo;
  doe::write_doe(exact, eo);
  std::istringstream ei(eo.str());
  DoeMatrix er = doe::read_doe(ei);
  CHECK(er.points == exact.points);
  CHECK(er.seed == 5);
}

TEST_CASE("doe csv parse errors name the offending row") {
  SUBCASE("odd layer count") {
    std::string text =
        "# seed=1 generator=mt19937_64\n"
        "sample_id,n_layers,thickness_mm,orientation_set,punch_velocity_mps,"
        "layer_temp_C,tool_temp_C,air_temp_C\n"
        "0,5,0.25,A,5.0,300,120,20\n";
    std::istringstream in(text);
    CHECK_THROWS_WITH_AS(doe::read_doe(in),
                         doctest::Contains("row 0"), ParseError);
  }
  SUBCASE("unknown orientation label") {
    std::string text =
        "# seed=1 generator=mt19937_64\n"
        "sample_id,n_layers,thickness_mm,orientation_set,punch_velocity_mps,"
        "layer_temp_C,tool_temp_C,air_temp_C\n"
        "0,8,0.25,C,5.0,300,120,20\n";
    std::istringstream in(text);
    CHECK_THROWS_WITH_AS(doe::read_doe(in),
                         doctest::Contains("orientation_set"), ParseError);
  }
  SUBCASE("out-of-range value") {
    std::string text =
        "# seed=1 generator=mt19937_64\n"
        "sample_id,n_layers,thickness_mm,orientation_set,punch_velocity_mps,"
        "layer_temp_C,tool_temp_C,air_temp_C\n"
        "0,8,0.25,A,9.0,300,120,20\n";
    std::istringstream in(text);
    CHECK_THROWS_AS(doe::read_doe(in), ParseError);
  }
  SUBCASE("header only gives an empty matrix") {
    std::string text =
        "# seed=9 generator=mt19937_64\n"
        "sample_id,n_layers,thickness_mm,orientation_set,punch_velocity_mps,"
        "layer_temp_C,tool_temp_C,air_temp_C\n";
    std::istringstream in(text);
    DoeMatrix m = doe::read_doe(in);
    CHECK(m.points.empty());
    CHECK(m.seed == 9);
  }
}

TEST_CASE("space validation rejects ill-formed spaces") {
  ParameterSpace s;
  s.n_layers_min = 5;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);

  s = ParameterSpace{};
  s.thickness = {0.6, 0.1};
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}
