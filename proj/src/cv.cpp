#include "crashforge/cv.hpp"

#include "crashforge/errors.hpp"
#include "crashforge/rng.hpp"

namespace crashforge::ml {

CvReport kfold_cv(const Matrix& X, const std::vector<double>& y, int k,
                  std::uint64_t seed, const Learner& learner) {
  std::size_t n = X.rows;
  if (k < 2) throw InvalidArgument("kfold_cv: k must be >= 2");
  if (static_cast<std::size_t>(k) > n) {
    throw InvalidArgument("kfold_cv: k exceeds the number of rows");
  }
  if (y.size() != n) throw InvalidArgument("kfold_cv: label size mismatch");

  Rng rng(seed);
  std::vector<std::size_t> perm = rng.permutation(n);

  // contiguous folds after the shuffle; the first n % k folds get the
  // extra row
  std::size_t base = n / static_cast<std::size_t>(k);
  std::size_t extra = n % static_cast<std::size_t>(k);

  CvReport report;
  std::size_t start = 0;
  for (int fold = 0; fold < k; ++fold) {
    std::size_t size = base + (static_cast<std::size_t>(fold) < extra ? 1 : 0);
    std::vector<std::size_t> test_idx(perm.begin() + start,
                                      perm.begin() + start + size);
    std::vector<std::size_t> train_idx;
    train_idx.reserve(n - size);
    train_idx.insert(train_idx.end(), perm.begin(), perm.begin() + start);
    train_idx.insert(train_idx.end(), perm.begin() + start + size, perm.end());
    start += size;

    Matrix Xtr = X.select_rows(train_idx);
    Matrix Xte = X.select_rows(test_idx);
    std::vector<double> ytr(train_idx.size()), yte(test_idx.size());
    for (std::size_t i = 0; i < train_idx.size(); ++i) ytr[i] = y[train_idx[i]];
    for (std::size_t i = 0; i < test_idx.size(); ++i) yte[i] = y[test_idx[i]];

    Predictor predict = learner(Xtr, ytr);
    std::vector<double> pred = predict(Xte);
    report.folds.push_back(eval_metrics(yte, pred));
  }

  EvalReport& m = report.mean;
  for (const EvalReport& f : report.folds) {
    m.mae += f.mae;
    m.mape += f.mape;
    m.r2 += f.r2;
    m.mape_excluded += f.mape_excluded;
  }
  double dk = static_cast<double>(k);
  m.mae /= dk;
  m.mape /= dk;
  m.r2 /= dk;
  return report;
}

namespace {

void enumerate_grid(const ParamGrid& grid, std::size_t axis, ParamMap& current,
                    std::vector<ParamMap>& out) {
  if (axis == grid.size()) {
    out.push_back(current);
    return;
  }
  for (double v : grid[axis].second) {
    current[grid[axis].first] = v;
    enumerate_grid(grid, axis + 1, current, out);
  }
}

}  // namespace

GridSearchResult grid_search(const Matrix& X, const std::vector<double>& y,
                             const ParamGrid& grid, int k, std::uint64_t seed,
                             const LearnerFactory& factory) {
  if (grid.empty()) throw InvalidArgument("grid_search: empty grid");
  for (const auto& [name, values] : grid) {
    if (values.empty()) {
      throw InvalidArgument("grid_search: empty value list for '" + name +
                            "'");
    }
  }

  std::vector<ParamMap> combos;
  ParamMap scratch;
  enumerate_grid(grid, 0, scratch, combos);

  GridSearchResult result;
  bool have_best = false;
  for (const ParamMap& params : combos) {
    CvReport rep = kfold_cv(X, y, k, seed, factory(params));
    if (!have_best || rep.mean.mae < result.best_report.mean.mae) {
      have_best = true;
      result.best_params = params;
      result.best_report = rep;
    }
    result.all.emplace_back(params, std::move(rep));
  }
  return result;
}

}  // namespace crashforge::ml
