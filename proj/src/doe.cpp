#include "crashforge/doe.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "crashforge/errors.hpp"
#include "crashforge/rng.hpp"
#include "crashforge/textio.hpp"

namespace crashforge::doe {

std::string to_string(Orientation o) {
  return o == Orientation::A ? "A" : "B";
}

Orientation orientation_from_string(const std::string& s) {
  if (s == "A") return Orientation::A;
  if (s == "B") return Orientation::B;
  throw InvalidArgument("unknown orientation set: '" + s + "'");
}

std::array<double, 4> layup_angles_deg(Orientation o) {
  if (o == Orientation::A) return {0.0, 45.0, -45.0, 90.0};
  return {30.0, -30.0, 60.0, -60.0};
}

namespace {

void check_interval(const Interval& iv, const char* name) {
  if (!(iv.lo <= iv.hi)) {
    throw InvalidArgument(std::string("interval ") + name +
                          ": lower bound exceeds upper bound");
  }
}

}  // namespace

void ParameterSpace::validate() const {
  if (n_layers_min % 2 != 0 || n_layers_max % 2 != 0) {
    throw InvalidArgument("layer-count bounds must be even");
  }
  if (n_layers_min < 2 || n_layers_min > n_layers_max) {
    throw InvalidArgument("layer-count range ill-formed");
  }
  check_interval(thickness, "thickness");
  check_interval(punch_velocity, "punch_velocity");
  check_interval(layer_temp, "layer_temp");
  check_interval(tool_temp, "tool_temp");
  check_interval(air_temp, "air_temp");
  if (orientation_sets != std::vector<std::string>{"A", "B"}) {
    throw InvalidArgument("orientation_sets must be the ordered pair {A, B}");
  }
}

void DesignPoint::validate(const ParameterSpace& space) const {
  if (n_layers % 2 != 0) {
    throw InvalidArgument("n_layers must be even, got " +
                          std::to_string(n_layers));
  }
  if (n_layers < space.n_layers_min || n_layers > space.n_layers_max) {
    throw InvalidArgument("n_layers out of range: " + std::to_string(n_layers));
  }
  auto check = [](const Interval& iv, double v, const char* name) {
    if (!iv.contains(v)) {
      throw InvalidArgument(std::string(name) + " out of range: " +
                            fmt_g9(v));
    }
  };
  check(space.thickness, thickness, "thickness");
  check(space.punch_velocity, punch_velocity, "punch_velocity");
  check(space.layer_temp, layer_temp, "layer_temp");
  check(space.tool_temp, tool_temp, "tool_temp");
  check(space.air_temp, air_temp, "air_temp");
}

DesignPoint snap(const std::array<double, 7>& latents,
                 const ParameterSpace& space) {
  for (double u : latents) {
    if (!(u >= 0.0 && u < 1.0)) {
      throw InvalidArgument("latent out of [0,1): " + fmt_g9(u));
    }
  }
  auto lerp = [](const Interval& iv, double u) {
    return iv.lo + u * (iv.hi - iv.lo);
  };
  DesignPoint p;
  int bins = space.layer_bin_count();
  int bin = static_cast<int>(latents[0] * bins);
  if (bin >= bins) bin = bins - 1;  // latent < 1 makes this unreachable
  p.n_layers = space.n_layers_min + 2 * bin;
  p.thickness = lerp(space.thickness, latents[1]);
  // half-open bins over the two sets: latent 0.5 lands in B
  p.orientation = latents[2] < 0.5 ? Orientation::A : Orientation::B;
  p.punch_velocity = lerp(space.punch_velocity, latents[3]);
  p.layer_temp = lerp(space.layer_temp, latents[4]);
  p.tool_temp = lerp(space.tool_temp, latents[5]);
  p.air_temp = lerp(space.air_temp, latents[6]);
  return p;
}

DoeMatrix lhs_sample(const ParameterSpace& space, std::size_t n,
                     std::uint64_t seed) {
  space.validate();
  if (n == 0) throw InvalidArgument("lhs_sample: n must be >= 1");

  // Draw order is fixed: for each of the 7 variables in declaration order,
  // one stratum permutation then n within-stratum offsets. Latent for
  // sample i of variable v is (perm[i] + u) / n.
  Rng rng(seed);
  constexpr std::size_t kVars = 7;
  std::vector<std::array<double, 7>> latents(n);
  for (std::size_t v = 0; v < kVars; ++v) {
    std::vector<std::size_t> perm = rng.permutation(n);
    for (std::size_t i = 0; i < n; ++i) {
      double u = rng.uniform01();
      latents[i][v] =
          (static_cast<double>(perm[i]) + u) / static_cast<double>(n);
    }
  }

  DoeMatrix m;
  m.seed = seed;
  m.space = space;
  m.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) m.points.push_back(snap(latents[i], space));
  return m;
}

namespace {

constexpr const char* kHeader =
    "sample_id,n_layers,thickness_mm,orientation_set,punch_velocity_mps,"
    "layer_temp_C,tool_temp_C,air_temp_C";

}  // namespace

void write_doe(const DoeMatrix& matrix, std::ostream& out) {
  out << "# seed=" << matrix.seed << " generator=" << Rng::kGeneratorName
      << "\n";
  out << kHeader << "\n";
  for (std::size_t i = 0; i < matrix.points.size(); ++i) {
    const DesignPoint& p = matrix.points[i];
    out << i << ',' << p.n_layers << ',' << fmt_g6(p.thickness) << ','
        << to_string(p.orientation) << ',' << fmt_g6(p.punch_velocity) << ','
        << fmt_g6(p.layer_temp) << ',' << fmt_g6(p.tool_temp) << ','
        << fmt_g6(p.air_temp) << "\n";
  }
}

void write_doe_file(const DoeMatrix& matrix, const std::string& path) {
  std::ostringstream ss;
  write_doe(matrix, ss);
  write_file(path, ss.str());
}

DoeMatrix read_doe(std::istream& in, const ParameterSpace& space) {
  space.validate();
  DoeMatrix m;
  m.space = space;

  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      // comment line; recover the seed if present
      std::size_t pos = line.find("seed=");
      if (pos != std::string::npos) {
        std::string rest = line.substr(pos + 5);
        std::size_t end = rest.find(' ');
        std::string val = end == std::string::npos ? rest : rest.substr(0, end);
        try {
          m.seed = std::stoull(val);
        } catch (const std::exception&) {
          throw ParseError("line " + std::to_string(lineno) +
                           ": bad seed value '" + val + "'");
        }
      }
      continue;
    }
    if (!header_seen) {
      if (trim(line) != kHeader) {
        throw ParseError("line " + std::to_string(lineno) +
                         ": unexpected header");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> f = split_csv(line);
    if (f.size() != 8) {
      throw ParseError("row " + std::to_string(row) + ": expected 8 fields, got " +
                       std::to_string(f.size()));
    }
    DesignPoint p;
    (void)parse_int_field(f[0], row, "sample_id");
    p.n_layers = static_cast<int>(parse_int_field(f[1], row, "n_layers"));
    p.thickness = parse_double_field(f[2], row, "thickness_mm");
    std::string ori = trim(f[3]);
    if (ori != "A" && ori != "B") {
      throw ParseError("row " + std::to_string(row) +
                       ", column 'orientation_set': unknown label '" + ori +
                       "'");
    }
    p.orientation = orientation_from_string(ori);
    p.punch_velocity = parse_double_field(f[4], row, "punch_velocity_mps");
    p.layer_temp = parse_double_field(f[5], row, "layer_temp_C");
    p.tool_temp = parse_double_field(f[6], row, "tool_temp_C");
    p.air_temp = parse_double_field(f[7], row, "air_temp_C");
    try {
      p.validate(space);
    } catch (const InvalidArgument& e) {
      throw ParseError("row " + std::to_string(row) + ": " + e.what());
    }
    m.points.push_back(p);
    ++row;
  }
  if (!header_seen) {
    throw ParseError("missing header line");
  }
  return m;
}

DoeMatrix read_doe_file(const std::string& path, const ParameterSpace& space) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open DOE file: " + path);
  return read_doe(in, space);
}

}  // namespace crashforge::doe
