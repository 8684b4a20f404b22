#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "crashforge/config.hpp"
#include "crashforge/dataset.hpp"

namespace crashforge::pipeline {

// Paths of everything a run emits, plus the manifest that records a
// checksum for each file.
struct RunArtifacts {
  std::filesystem::path out_dir;
  std::filesystem::path doe_csv;
  std::filesystem::path forming_csv;
  std::filesystem::path metrics_csv;
  std::filesystem::path dataset_csv;
  std::filesystem::path tuned_params;
  std::filesystem::path eval_report;
  std::filesystem::path predictions_csv;
  std::filesystem::path importance_csv;
  std::map<std::string, std::filesystem::path> pareto_csvs;  // per target
  std::filesystem::path manifest;

  static RunArtifacts layout(const std::filesystem::path& out_dir);
};

// Stage names in execution order: sample, simulate, extract, tune, train,
// symreg, report.
const std::vector<std::string>& stage_names();

// Runs one named stage unconditionally (inputs must exist; a missing
// input raises MissingArtifact wrapped in StageError).
void run_stage(const std::string& name, const RunConfig& cfg);

// Runs the full chain. Stages are skipped when the manifest carries the
// same config hash and the stage's outputs are already present, which
// makes interrupted runs resumable.
RunArtifacts run_pipeline(const RunConfig& cfg);

// Loads the dataset CSV into the learning view (orientation encoded 0/1).
ml::Dataset load_dataset_csv(const std::filesystem::path& path);

// The symbolic-regression view: type-B rows only, features (a, b, c, d) =
// (n_layers, thickness, layer_temp, tool_temp).
ml::Dataset symreg_view(const ml::Dataset& full);

}  // namespace crashforge::pipeline
