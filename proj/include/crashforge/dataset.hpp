#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace crashforge::ml {

// Dense row-major matrix; all learners operate on this.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }

  Matrix select_rows(std::span<const std::size_t> idx) const;
};

// The learning view of a run: the 7 design features (orientation encoded
// 0 = A / 1 = B) plus one column per target. Feature order is fixed:
//   n_layers, thickness_mm, orientation, punch_velocity_mps,
//   layer_temp_C, tool_temp_C, air_temp_C
struct Dataset {
  std::vector<std::string> feature_names;
  Matrix X;
  std::map<std::string, std::vector<double>> y;
  std::vector<long long> sample_ids;

  std::size_t size() const { return X.rows; }
};

const std::vector<std::string>& default_feature_names();
const std::vector<std::string>& target_names();  // cle, ea, intrusion, decel

// Deterministic train/test split by seeded permutation. The test set
// receives the rounding remainder, so 266 rows at fraction 0.2 split
// 212/54. Throws InvalidArgument for n < 2 or fraction outside (0,1).
std::pair<Dataset, Dataset> train_test_split(const Dataset& ds,
                                             double test_fraction,
                                             std::uint64_t seed);

struct EvalReport {
  double mae = 0.0;   // mean absolute error, target units
  double mape = 0.0;  // mean absolute percentage error, percent
  double r2 = 0.0;
  std::size_t mape_excluded = 0;  // rows skipped by the |y| > eps guard
};

// MAE / MAPE / R^2 of a prediction vector. MAPE skips entries with
// |y_true| <= 1e-12 and reports how many were skipped; an all-zero truth
// vector or a constant truth vector (undefined R^2) raises UndefinedMetric.
EvalReport eval_metrics(std::span<const double> y_true,
                        std::span<const double> y_pred);

}  // namespace crashforge::ml
