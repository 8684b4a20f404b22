#include "crashforge/dataset.hpp"

#include <cmath>

#include "crashforge/errors.hpp"
#include "crashforge/rng.hpp"

namespace crashforge::ml {

Matrix Matrix::select_rows(std::span<const std::size_t> idx) const {
  Matrix out(idx.size(), cols);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t c = 0; c < cols; ++c) out.at(i, c) = at(idx[i], c);
  }
  return out;
}

const std::vector<std::string>& default_feature_names() {
  static const std::vector<std::string> kNames = {
      "n_layers",     "thickness_mm", "orientation", "punch_velocity_mps",
      "layer_temp_C", "tool_temp_C",  "air_temp_C"};
  return kNames;
}

const std::vector<std::string>& target_names() {
  static const std::vector<std::string> kNames = {"cle", "ea", "intrusion",
                                                  "decel"};
  return kNames;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds,
                                             double test_fraction,
                                             std::uint64_t seed) {
  std::size_t n = ds.size();
  if (n < 2) throw InvalidArgument("train_test_split: need at least 2 rows");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidArgument("train_test_split: fraction must lie in (0,1)");
  }
  // train gets floor(n * (1 - f)); the remainder goes to test, which makes
  // 266 rows at f = 0.2 come out as 212/54.
  std::size_t n_train = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * (1.0 - test_fraction) + 1e-9));
  if (n_train == 0) n_train = 1;
  if (n_train == n) n_train = n - 1;

  Rng rng(seed);
  std::vector<std::size_t> perm = rng.permutation(n);

  auto take = [&](std::size_t begin, std::size_t end) {
    Dataset out;
    out.feature_names = ds.feature_names;
    std::vector<std::size_t> idx(perm.begin() + begin, perm.begin() + end);
    out.X = ds.X.select_rows(idx);
    for (const auto& [name, col] : ds.y) {
      std::vector<double> v(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) v[i] = col[idx[i]];
      out.y[name] = std::move(v);
    }
    if (!ds.sample_ids.empty()) {
      out.sample_ids.resize(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) {
        out.sample_ids[i] = ds.sample_ids[idx[i]];
      }
    }
    return out;
  };

  return {take(0, n_train), take(n_train, n)};
}

EvalReport eval_metrics(std::span<const double> y_true,
                        std::span<const double> y_pred) {
  if (y_true.empty() || y_true.size() != y_pred.size()) {
    throw InvalidArgument("eval_metrics: length mismatch or empty input");
  }
  constexpr double kMapeEps = 1e-12;
  std::size_t n = y_true.size();

  double mean = 0.0;
  for (double v : y_true) mean += v;
  mean /= static_cast<double>(n);

  double abs_sum = 0.0, sq_sum = 0.0, var_sum = 0.0, mape_sum = 0.0;
  std::size_t mape_n = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = y_true[i] - y_pred[i];
    abs_sum += std::abs(e);
    sq_sum += e * e;
    var_sum += (y_true[i] - mean) * (y_true[i] - mean);
    if (std::abs(y_true[i]) > kMapeEps) {
      mape_sum += std::abs(e) / std::abs(y_true[i]);
      ++mape_n;
    }
  }

  EvalReport rep;
  rep.mae = abs_sum / static_cast<double>(n);
  rep.mape_excluded = n - mape_n;
  if (mape_n == 0) {
    throw UndefinedMetric("eval_metrics: MAPE undefined, y_true is all zero");
  }
  rep.mape = 100.0 * mape_sum / static_cast<double>(mape_n);
  if (var_sum <= 0.0) {
    throw UndefinedMetric("eval_metrics: R^2 undefined, y_true is constant");
  }
  rep.r2 = 1.0 - sq_sum / var_sum;
  return rep;
}

}  // namespace crashforge::ml
