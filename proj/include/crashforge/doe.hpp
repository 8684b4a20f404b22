#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace crashforge::doe {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
  double width() const { return hi - lo; }
};

// The two candidate layups for the organosheet stack. A is the
// quasi-isotropic set, B the rotated +-30/+-60 set.
enum class Orientation : int { A = 0, B = 1 };

std::string to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

// Ply angles (degrees) of each orientation set.
std::array<double, 4> layup_angles_deg(Orientation o);

// The 7-variable design/process space. Defaults are the production ranges:
// 4-16 layers (even), 0.1-0.6 mm ply thickness, two layup sets, punch
// velocity 4-6.5 m/s, layer temperature 200-400 C, tool temperature
// 20-220 C, air temperature 10-30 C.
struct ParameterSpace {
  int n_layers_min = 4;   // inclusive, even
  int n_layers_max = 16;  // inclusive, even
  Interval thickness{0.1, 0.6};       // mm per layer
  Interval punch_velocity{4.0, 6.5};  // m/s
  Interval layer_temp{200.0, 400.0};  // degC
  Interval tool_temp{20.0, 220.0};    // degC (punch/die)
  Interval air_temp{10.0, 30.0};      // degC

  std::vector<std::string> orientation_sets{"A", "B"};

  // Number of admissible layer counts (even values in range).
  int layer_bin_count() const { return (n_layers_max - n_layers_min) / 2 + 1; }

  // Throws InvalidArgument on an ill-formed space (odd bounds, inverted
  // intervals, wrong orientation list).
  void validate() const;
};

// One sampled design. The symbolic-regression feature mapping is
// a = n_layers, b = thickness, c = layer_temp, d = tool_temp.
struct DesignPoint {
  int n_layers = 8;
  double thickness = 0.25;  // mm per layer
  Orientation orientation = Orientation::A;
  double punch_velocity = 5.0;  // m/s
  double layer_temp = 300.0;    // degC
  double tool_temp = 120.0;     // degC
  double air_temp = 20.0;       // degC

  double total_thickness() const { return n_layers * thickness; }  // mm

  // Throws InvalidArgument if the point violates the space.
  void validate(const ParameterSpace& space) const;

  bool operator==(const DesignPoint&) const = default;
};

struct DoeMatrix {
  std::vector<DesignPoint> points;
  std::uint64_t seed = 0;
  ParameterSpace space;
};

// Maps seven latent coordinates in [0,1) onto a DesignPoint: the layer
// count by uniform binning over the even values, the orientation by
// half-open binning over the two sets (0.5 -> B), and the continuous
// variables by linear interpolation. Latent order matches the declaration
// order of DesignPoint fields.
DesignPoint snap(const std::array<double, 7>& latents,
                 const ParameterSpace& space);

// Latin hypercube sample: per variable, the n samples occupy the n
// equal-width strata of [0,1) exactly once, placed uniformly within each
// stratum, with independently permuted stratum order. Deterministic for a
// fixed (space, n, seed).
DoeMatrix lhs_sample(const ParameterSpace& space, std::size_t n,
                     std::uint64_t seed);

// CSV persistence. Schema:
//   # seed=<u64> generator=<name>
//   sample_id,n_layers,thickness_mm,orientation_set,punch_velocity_mps,
//   layer_temp_C,tool_temp_C,air_temp_C
// Reals carry 6 significant digits.
void write_doe(const DoeMatrix& matrix, std::ostream& out);
void write_doe_file(const DoeMatrix& matrix, const std::string& path);

// Parses and validates against `space` (defaults to the production space);
// a malformed or out-of-range row raises ParseError naming row and column.
DoeMatrix read_doe(std::istream& in, const ParameterSpace& space = {});
DoeMatrix read_doe_file(const std::string& path,
                        const ParameterSpace& space = {});

}  // namespace crashforge::doe
