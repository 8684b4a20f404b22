#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crashforge/dataset.hpp"

namespace crashforge::ml {

struct TreeParams {
  int max_depth = 6;
  int min_samples_leaf = 1;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf prediction
  double gain = 0.0;   // split gain (variance reduction or regularized)
  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict_row(std::span<const double> x) const;
  std::vector<double> predict(const Matrix& X) const;
  // Adds each split's gain into per-feature accumulators.
  void accumulate_gain(std::vector<double>& gain_by_feature) const;
};

// Split objective. Variance: plain CART (squared-error reduction, leaf =
// mean). Regularized: second-order boosting form with leaf G/(H + lambda)
// and gain penalized by gamma per split (H = sample count for squared
// error).
struct SplitObjective {
  bool regularized = false;
  double lambda = 0.0;
  double gamma = 0.0;
};

// Greedy CART fit: exact enumeration of midpoints between sorted unique
// feature values, best squared-error reduction wins (ties: first feature,
// lowest threshold). Throws InvalidArgument on empty data.
Tree fit_regression_tree(const Matrix& X, std::span<const double> y,
                         const TreeParams& params);

// Shared builder used by the ensembles. `features_per_split` > 0 samples
// that many candidate features per split (random forest); `rng_seed` only
// matters in that case.
Tree fit_tree(const Matrix& X, std::span<const double> y,
              const TreeParams& params, const SplitObjective& objective,
              int features_per_split = -1, std::uint64_t rng_seed = 0);

}  // namespace crashforge::ml
