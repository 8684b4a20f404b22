#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "crashforge/dataset.hpp"

namespace crashforge::ml {

// A learner maps training data to a predictor.
using Predictor = std::function<std::vector<double>(const Matrix&)>;
using Learner =
    std::function<Predictor(const Matrix&, const std::vector<double>&)>;

struct CvReport {
  std::vector<EvalReport> folds;
  EvalReport mean;
};

// k-fold cross-validation: seeded shuffle, contiguous folds with sizes
// differing by at most one, each row tested exactly once. Throws
// InvalidArgument for k < 2 or k > n.
CvReport kfold_cv(const Matrix& X, const std::vector<double>& y, int k,
                  std::uint64_t seed, const Learner& learner);

// One hyperparameter assignment.
using ParamMap = std::map<std::string, double>;

// Grid axes in enumeration order: the full Cartesian product is evaluated
// with the first axis varying slowest and values in list order.
using ParamGrid = std::vector<std::pair<std::string, std::vector<double>>>;

using LearnerFactory = std::function<Learner(const ParamMap&)>;

struct GridSearchResult {
  ParamMap best_params;
  CvReport best_report;
  std::vector<std::pair<ParamMap, CvReport>> all;  // enumeration order
};

// Exhaustive grid search minimizing mean CV MAE; ties keep the earliest
// combination in enumeration order. Throws InvalidArgument on an empty
// grid or an empty value list.
GridSearchResult grid_search(const Matrix& X, const std::vector<double>& y,
                             const ParamGrid& grid, int k, std::uint64_t seed,
                             const LearnerFactory& factory);

}  // namespace crashforge::ml
