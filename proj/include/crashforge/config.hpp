#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crashforge/doe.hpp"
#include "crashforge/forming.hpp"
#include "crashforge/material.hpp"
#include "crashforge/rom.hpp"
#include "crashforge/symreg.hpp"

namespace crashforge::pipeline {

enum class DataSource { surrogate, oracle, oracle_noisy };

std::string to_string(DataSource s);
DataSource data_source_from_string(const std::string& s);

// Hyperparameter grids for the tuner; flat config lists.
struct MlConfig {
  double test_fraction = 0.2;
  int cv_folds = 5;
  int min_samples_leaf = 1;
  std::vector<double> gbt_depths{2, 3, 4};
  std::vector<double> gbt_learning_rates{0.05, 0.1, 0.3};
  std::vector<double> gbt_rounds{100, 300};
  std::vector<double> xgb_lambdas{0, 1};
  std::vector<double> rf_trees{100, 300};
  std::vector<double> rf_depths{2, 3, 4};
  int rf_features_per_split = 3;
};

// Full run configuration. Parsed from a flat key=value file with
// namespaced keys (doe.n_samples, ml.gbt.learning_rates, ...); unknown
// keys are rejected.
struct RunConfig {
  std::uint64_t seed = 42;
  int workers = 1;
  std::string out_dir = "out";

  std::size_t n_samples = 400;
  doe::ParameterSpace space;

  DataSource data_source = DataSource::surrogate;
  double noise_sigma_rel = 0.01;

  bool forming_enabled = true;
  forming::FeasibilityWeights forming_weights;
  forming::ToolGeometry geometry;

  crashsim::MaterialCard material;
  crashsim::SolverSettings solver;
  bool save_traces = false;
  long long report_trace_sample = 0;

  MlConfig ml;
  symreg::SymregConfig symreg_cfg;

  // Derived seeds: one base seed drives every stage through fixed offsets.
  std::uint64_t doe_seed() const { return seed; }
  std::uint64_t split_seed() const { return seed + 1; }
  std::uint64_t noise_seed() const { return seed + 2; }
  std::uint64_t symreg_seed() const { return seed + 3; }
  std::uint64_t forest_seed() const { return seed + 4; }

  // Canonical serialization: every effective key=value pair, sorted by
  // key, one per line. Doubles use 17 significant digits so the hash sees
  // exact values.
  std::string canonical() const;
  std::string config_hash() const;  // fnv1a64 hex of canonical()

  void validate() const;  // throws ConfigError
};

// Parses a config file into `base` (defaults stay where keys are absent).
// Throws ConfigError on unknown keys or unparsable values.
RunConfig parse_config_file(const std::string& path,
                            const RunConfig& base = {});
RunConfig parse_config_text(const std::string& text,
                            const RunConfig& base = {});

}  // namespace crashforge::pipeline
