#include "crashforge/ensemble.hpp"

#include <fstream>

#include <json.hpp>

#include "crashforge/errors.hpp"
#include "crashforge/rng.hpp"

namespace crashforge::ml {

std::string to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::gbt: return "gbt";
    case EnsembleKind::gbt_regularized: return "gbt_regularized";
    case EnsembleKind::random_forest: return "random_forest";
  }
  return "gbt";
}

EnsembleKind ensemble_kind_from_string(const std::string& s) {
  if (s == "gbt") return EnsembleKind::gbt;
  if (s == "gbt_regularized") return EnsembleKind::gbt_regularized;
  if (s == "random_forest") return EnsembleKind::random_forest;
  throw InvalidArgument("unknown ensemble kind: " + s);
}

double Ensemble::predict_row(std::span<const double> x) const {
  if (kind == EnsembleKind::random_forest) {
    if (trees.empty()) return base_score;
    double sum = 0.0;
    for (const Tree& t : trees) sum += t.predict_row(x);
    return sum / static_cast<double>(trees.size());
  }
  double out = base_score;
  for (const Tree& t : trees) out += learning_rate * t.predict_row(x);
  return out;
}

std::vector<double> Ensemble::predict(const Matrix& X) const {
  std::vector<double> out(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r) out[r] = predict_row(X.row(r));
  return out;
}

Ensemble fit_gradient_boosting(const Matrix& X, std::span<const double> y,
                               const GbtParams& params, bool regularized) {
  if (X.rows == 0 || y.size() != X.rows) {
    throw InvalidArgument("fit_gradient_boosting: empty data");
  }
  if (params.n_rounds < 1) {
    throw InvalidArgument("fit_gradient_boosting: n_rounds must be >= 1");
  }
  if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0)) {
    throw InvalidArgument(
        "fit_gradient_boosting: learning_rate must lie in (0,1]");
  }
  if (params.lambda < 0.0 || params.gamma < 0.0) {
    throw InvalidArgument("fit_gradient_boosting: lambda/gamma must be >= 0");
  }

  Ensemble model;
  model.kind = regularized ? EnsembleKind::gbt_regularized : EnsembleKind::gbt;
  model.learning_rate = params.learning_rate;
  model.feature_gain.assign(X.cols, 0.0);
  model.hyperparameters = {
      {"n_rounds", static_cast<double>(params.n_rounds)},
      {"learning_rate", params.learning_rate},
      {"max_depth", static_cast<double>(params.max_depth)},
      {"min_samples_leaf", static_cast<double>(params.min_samples_leaf)},
  };
  if (regularized) {
    model.hyperparameters["lambda"] = params.lambda;
    model.hyperparameters["gamma"] = params.gamma;
  }

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  model.base_score = mean;

  std::vector<double> residual(y.begin(), y.end());
  for (double& r : residual) r -= mean;

  TreeParams tp{params.max_depth, params.min_samples_leaf};
  SplitObjective obj;
  obj.regularized = regularized;
  obj.lambda = regularized ? params.lambda : 0.0;
  obj.gamma = regularized ? params.gamma : 0.0;

  model.trees.reserve(params.n_rounds);
  for (int round = 0; round < params.n_rounds; ++round) {
    Tree t = fit_tree(X, residual, tp, obj);
    t.accumulate_gain(model.feature_gain);
    for (std::size_t r = 0; r < X.rows; ++r) {
      residual[r] -= params.learning_rate * t.predict_row(X.row(r));
    }
    model.trees.push_back(std::move(t));
  }
  return model;
}

Ensemble fit_random_forest(const Matrix& X, std::span<const double> y,
                           const ForestParams& params) {
  if (X.rows == 0 || y.size() != X.rows) {
    throw InvalidArgument("fit_random_forest: empty data");
  }
  if (params.n_trees < 1) {
    throw InvalidArgument("fit_random_forest: n_trees must be >= 1");
  }

  Ensemble model;
  model.kind = EnsembleKind::random_forest;
  model.feature_gain.assign(X.cols, 0.0);
  model.hyperparameters = {
      {"n_trees", static_cast<double>(params.n_trees)},
      {"max_depth", static_cast<double>(params.max_depth)},
      {"min_samples_leaf", static_cast<double>(params.min_samples_leaf)},
      {"features_per_split", static_cast<double>(params.features_per_split)},
      {"bootstrap", params.bootstrap ? 1.0 : 0.0},
      {"seed", static_cast<double>(params.seed)},
  };

  TreeParams tp{params.max_depth, params.min_samples_leaf};
  std::size_t n = X.rows;
  model.trees.reserve(params.n_trees);
  // Per-tree substreams keep the forest identical no matter how trees are
  // scheduled.
  for (int t = 0; t < params.n_trees; ++t) {
    std::uint64_t tree_seed =
        substream_seed(params.seed, static_cast<std::uint64_t>(t));
    Rng rng(tree_seed);
    Matrix Xb;
    std::vector<double> yb;
    const Matrix* Xfit = &X;
    std::span<const double> yfit = y;
    if (params.bootstrap) {
      std::vector<std::size_t> rows(n);
      for (std::size_t i = 0; i < n; ++i) rows[i] = rng.below(n);
      Xb = X.select_rows(rows);
      yb.resize(n);
      for (std::size_t i = 0; i < n; ++i) yb[i] = y[rows[i]];
      Xfit = &Xb;
      yfit = yb;
    }
    Tree tree = fit_tree(*Xfit, yfit, tp, SplitObjective{},
                         params.features_per_split, rng.next_u64());
    tree.accumulate_gain(model.feature_gain);
    model.trees.push_back(std::move(tree));
  }
  return model;
}

std::map<std::string, double> feature_importance(
    const Ensemble& model, const std::vector<std::string>& feature_names) {
  if (feature_names.size() != model.feature_gain.size()) {
    throw InvalidArgument("feature_importance: name/gain size mismatch");
  }
  double total = 0.0;
  for (double g : model.feature_gain) total += g;
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    out[feature_names[i]] =
        total > 0.0 ? model.feature_gain[i] / total : 0.0;
  }
  return out;
}

namespace {

nlohmann::json tree_to_json(const Tree& t) {
  nlohmann::json j;
  auto& feature = j["feature"] = nlohmann::json::array();
  auto& threshold = j["threshold"] = nlohmann::json::array();
  auto& left = j["left"] = nlohmann::json::array();
  auto& right = j["right"] = nlohmann::json::array();
  auto& value = j["value"] = nlohmann::json::array();
  auto& gain = j["gain"] = nlohmann::json::array();
  for (const TreeNode& nd : t.nodes) {
    feature.push_back(nd.feature);
    threshold.push_back(nd.threshold);
    left.push_back(nd.left);
    right.push_back(nd.right);
    value.push_back(nd.value);
    gain.push_back(nd.gain);
  }
  return j;
}

Tree tree_from_json(const nlohmann::json& j) {
  Tree t;
  std::size_t n = j.at("feature").size();
  t.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    TreeNode& nd = t.nodes[i];
    nd.feature = j.at("feature")[i].get<int>();
    nd.threshold = j.at("threshold")[i].get<double>();
    nd.left = j.at("left")[i].get<int>();
    nd.right = j.at("right")[i].get<int>();
    nd.value = j.at("value")[i].get<double>();
    nd.gain = j.at("gain")[i].get<double>();
  }
  return t;
}

}  // namespace

void save_ensemble(const Ensemble& model, const std::string& path) {
  nlohmann::json j;
  j["format"] = "crashforge-ensemble";
  j["version"] = 1;
  j["kind"] = to_string(model.kind);
  j["base_score"] = model.base_score;
  j["learning_rate"] = model.learning_rate;
  j["hyperparameters"] = model.hyperparameters;
  j["feature_gain"] = model.feature_gain;
  j["trees"] = nlohmann::json::array();
  for (const Tree& t : model.trees) j["trees"].push_back(tree_to_json(t));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file: " + path);
  out << j.dump(1) << "\n";
}

Ensemble load_ensemble(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("model file " + path + ": " + e.what());
  }
  if (j.value("format", "") != "crashforge-ensemble") {
    throw ParseError("model file " + path + ": unrecognized format");
  }
  if (j.value("version", 0) != 1) {
    throw ParseError("model file " + path + ": unsupported version");
  }
  Ensemble m;
  m.kind = ensemble_kind_from_string(j.at("kind").get<std::string>());
  m.base_score = j.at("base_score").get<double>();
  m.learning_rate = j.at("learning_rate").get<double>();
  m.hyperparameters =
      j.at("hyperparameters").get<std::map<std::string, double>>();
  m.feature_gain = j.at("feature_gain").get<std::vector<double>>();
  for (const auto& tj : j.at("trees")) m.trees.push_back(tree_from_json(tj));
  return m;
}

}  // namespace crashforge::ml
