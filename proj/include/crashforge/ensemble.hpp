#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "crashforge/tree.hpp"

namespace crashforge::ml {

enum class EnsembleKind { gbt, gbt_regularized, random_forest };

std::string to_string(EnsembleKind k);
EnsembleKind ensemble_kind_from_string(const std::string& s);

struct GbtParams {
  int n_rounds = 300;
  double learning_rate = 0.1;
  int max_depth = 3;
  int min_samples_leaf = 1;
  double lambda = 0.0;  // regularized variant only
  double gamma = 0.0;   // regularized variant only
};

struct ForestParams {
  int n_trees = 300;
  int max_depth = 12;
  int min_samples_leaf = 1;
  int features_per_split = 3;  // <= 0 means all features
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct Ensemble {
  EnsembleKind kind = EnsembleKind::gbt;
  double base_score = 0.0;
  double learning_rate = 1.0;
  std::vector<Tree> trees;
  std::map<std::string, double> hyperparameters;
  std::vector<double> feature_gain;  // accumulated split gain per feature

  double predict_row(std::span<const double> x) const;
  std::vector<double> predict(const Matrix& X) const;
};

// Stagewise squared-error boosting on residuals from the mean. The
// regularized flavor uses leaf values G/(H + lambda) and the second-order
// split gain with complexity penalty gamma.
Ensemble fit_gradient_boosting(const Matrix& X, std::span<const double> y,
                               const GbtParams& params,
                               bool regularized = false);

// Bagged trees: bootstrap rows per tree, random feature subset per split,
// prediction = mean over trees. Identical seeds give identical forests.
Ensemble fit_random_forest(const Matrix& X, std::span<const double> y,
                           const ForestParams& params);

// Total split gain per feature, normalized to sum 1; all-zero when the
// model contains no splits.
std::map<std::string, double> feature_importance(
    const Ensemble& model, const std::vector<std::string>& feature_names);

// Versioned single-file JSON persistence; loading reproduces predictions
// bit-exactly.
void save_ensemble(const Ensemble& model, const std::string& path);
Ensemble load_ensemble(const std::string& path);

}  // namespace crashforge::ml
