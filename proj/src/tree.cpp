#include "crashforge/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crashforge/errors.hpp"
#include "crashforge/rng.hpp"

namespace crashforge::ml {

double Tree::predict_row(std::span<const double> x) const {
  int i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& nd = nodes[i];
    i = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
  }
  return nodes[i].value;
}

std::vector<double> Tree::predict(const Matrix& X) const {
  std::vector<double> out(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r) out[r] = predict_row(X.row(r));
  return out;
}

void Tree::accumulate_gain(std::vector<double>& gain_by_feature) const {
  for (const TreeNode& nd : nodes) {
    if (!nd.is_leaf()) gain_by_feature[nd.feature] += nd.gain;
  }
}

namespace {

struct Builder {
  const Matrix& X;
  std::span<const double> y;
  TreeParams params;
  SplitObjective obj;
  int features_per_split;
  Rng rng;
  Tree tree;

  Builder(const Matrix& x, std::span<const double> yy, const TreeParams& p,
          const SplitObjective& o, int fps, std::uint64_t seed)
      : X(x), y(yy), params(p), obj(o), features_per_split(fps), rng(seed) {}

  double leaf_value(double sum, std::size_t count) const {
    if (obj.regularized) {
      return sum / (static_cast<double>(count) + obj.lambda);
    }
    return sum / static_cast<double>(count);
  }

  // Score of a group under the objective; larger is better. Variance
  // objective uses -SSE (via the sum/sumsq identity); regularized uses
  // G^2/(H + lambda).
  double group_score(double sum, double sumsq, std::size_t count) const {
    if (obj.regularized) {
      return sum * sum / (static_cast<double>(count) + obj.lambda);
    }
    return -(sumsq - sum * sum / static_cast<double>(count));
  }

  struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
    std::size_t left_count = 0;
  };

  SplitChoice best_split(std::vector<std::size_t>& idx) {
    std::size_t n = idx.size();
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i : idx) {
      sum += y[i];
      sumsq += y[i] * y[i];
    }
    double parent = group_score(sum, sumsq, n);

    std::vector<int> features(X.cols);
    std::iota(features.begin(), features.end(), 0);
    if (features_per_split > 0 &&
        features_per_split < static_cast<int>(X.cols)) {
      // sample a subset without replacement, keeping ascending order so
      // tie-breaking stays by feature index
      for (int k = 0; k < features_per_split; ++k) {
        std::size_t j = k + rng.below(features.size() - k);
        std::swap(features[k], features[j]);
      }
      features.resize(features_per_split);
      std::sort(features.begin(), features.end());
    }

    SplitChoice best;
    std::vector<std::pair<double, double>> vals(n);  // (feature value, y)
    for (int f : features) {
      for (std::size_t i = 0; i < n; ++i) {
        vals[i] = {X.at(idx[i], f), y[idx[i]]};
      }
      std::sort(vals.begin(), vals.end());
      double lsum = 0.0, lsq = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        lsum += vals[i].second;
        lsq += vals[i].second * vals[i].second;
        if (vals[i].first == vals[i + 1].first) continue;  // not a boundary
        std::size_t nl = i + 1, nr = n - nl;
        if (nl < static_cast<std::size_t>(params.min_samples_leaf) ||
            nr < static_cast<std::size_t>(params.min_samples_leaf)) {
          continue;
        }
        double gain = group_score(lsum, lsq, nl) +
                      group_score(sum - lsum, sumsq - lsq, nr) - parent;
        if (obj.regularized) gain = 0.5 * gain - obj.gamma;
        // strictly-better acceptance keeps the first feature / lowest
        // threshold on ties
        if (gain > 1e-12 && (!best.found || gain > best.gain + 1e-12)) {
          best.found = true;
          best.feature = f;
          best.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
          best.gain = gain;
          best.left_count = nl;
        }
      }
    }
    return best;
  }

  int build(std::vector<std::size_t> idx, int depth) {
    double sum = 0.0;
    for (std::size_t i : idx) sum += y[i];

    int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[node_id].value = leaf_value(sum, idx.size());

    if (depth >= params.max_depth ||
        idx.size() < 2 * static_cast<std::size_t>(params.min_samples_leaf)) {
      return node_id;
    }
    SplitChoice split = best_split(idx);
    if (!split.found) return node_id;

    std::vector<std::size_t> left, right;
    left.reserve(split.left_count);
    right.reserve(idx.size() - split.left_count);
    for (std::size_t i : idx) {
      (X.at(i, split.feature) <= split.threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    int l = build(std::move(left), depth + 1);
    int r = build(std::move(right), depth + 1);
    TreeNode& nd = tree.nodes[node_id];
    nd.feature = split.feature;
    nd.threshold = split.threshold;
    nd.gain = split.gain;
    nd.left = l;
    nd.right = r;
    return node_id;
  }
};

}  // namespace

Tree fit_tree(const Matrix& X, std::span<const double> y,
              const TreeParams& params, const SplitObjective& objective,
              int features_per_split, std::uint64_t rng_seed) {
  if (X.rows == 0 || y.size() != X.rows) {
    throw InvalidArgument("fit_tree: empty data or row/label mismatch");
  }
  if (params.max_depth < 0 || params.min_samples_leaf < 1) {
    throw InvalidArgument("fit_tree: bad tree parameters");
  }
  Builder b(X, y, params, objective, features_per_split, rng_seed);
  std::vector<std::size_t> idx(X.rows);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  b.build(std::move(idx), 0);
  return std::move(b.tree);
}

Tree fit_regression_tree(const Matrix& X, std::span<const double> y,
                         const TreeParams& params) {
  return fit_tree(X, y, params, SplitObjective{});
}

}  // namespace crashforge::ml
