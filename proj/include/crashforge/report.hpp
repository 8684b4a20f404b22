#pragma once

#include <filesystem>
#include <vector>

#include "crashforge/config.hpp"

namespace crashforge::pipeline {

// Renders the SVG report set from the run's CSV/JSON artifacts: per-target
// parity scatter (with R^2 annotation), feature-importance bars, the
// symbolic-regression fronts, and (for surrogate runs that saved one) the
// force/energy trace of the configured sample. Every number plotted comes
// from a CSV artifact, so the plots are never the only record. Missing or
// empty inputs raise MissingArtifact naming the file.
std::vector<std::filesystem::path> emit_report(const RunConfig& cfg);

}  // namespace crashforge::pipeline
