#include "crashforge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "crashforge/cv.hpp"
#include "crashforge/ensemble.hpp"
#include "crashforge/errors.hpp"
#include "crashforge/metrics.hpp"
#include "crashforge/oracle.hpp"
#include "crashforge/report.hpp"
#include "crashforge/rng.hpp"
#include "crashforge/rom.hpp"
#include "crashforge/textio.hpp"

namespace crashforge::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

RunArtifacts RunArtifacts::layout(const fs::path& out_dir) {
  RunArtifacts a;
  a.out_dir = out_dir;
  a.doe_csv = out_dir / "doe.csv";
  a.forming_csv = out_dir / "forming.csv";
  a.metrics_csv = out_dir / "metrics.csv";
  a.dataset_csv = out_dir / "dataset.csv";
  a.tuned_params = out_dir / "tuned_params.json";
  a.eval_report = out_dir / "eval_report.json";
  a.predictions_csv = out_dir / "predictions.csv";
  a.importance_csv = out_dir / "importance.csv";
  for (const std::string& t : ml::target_names()) {
    a.pareto_csvs[t] = out_dir / ("pareto_" + t + ".csv");
  }
  a.manifest = out_dir / "manifest.json";
  return a;
}

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> kStages = {
      "sample", "simulate", "extract", "tune", "train", "symreg", "report"};
  return kStages;
}

namespace {

// ---------------------------------------------------------------------
// manifest
// ---------------------------------------------------------------------

struct Manifest {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::map<std::string, bool> stages;
  std::map<std::string, std::string> files;  // relative path -> checksum

  static Manifest load(const fs::path& path) {
    Manifest m;
    if (!fs::exists(path)) return m;
    json j;
    try {
      std::ifstream in(path);
      in >> j;
      m.config_hash = j.value("config_hash", "");
      m.seed = j.value("seed", std::uint64_t{0});
      if (j.contains("stages")) {
        m.stages = j["stages"].get<std::map<std::string, bool>>();
      }
      if (j.contains("files")) {
        m.files = j["files"].get<std::map<std::string, std::string>>();
      }
    } catch (const json::exception&) {
      return Manifest{};  // treat an unreadable manifest as absent
    }
    return m;
  }

  void save(const fs::path& path) const {
    json j;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["generator"] = Rng::kGeneratorName;
    j["stages"] = stages;
    j["files"] = files;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write manifest: " + path.string());
    out << j.dump(1) << "\n";
  }

  void record_file(const fs::path& out_dir, const fs::path& file) {
    std::string rel = fs::relative(file, out_dir).string();
    files[rel] = to_hex(fnv1a64(read_file(file.string())));
  }
};

// Shared context for stage runners.
struct StageContext {
  const RunConfig& cfg;
  RunArtifacts art;
  Manifest manifest;

  explicit StageContext(const RunConfig& cfg_in)
      : cfg(cfg_in), art(RunArtifacts::layout(cfg_in.out_dir)) {
    fs::create_directories(art.out_dir);
    manifest = Manifest::load(art.manifest);
    std::string hash = cfg.config_hash();
    if (manifest.config_hash != hash) {
      manifest = Manifest{};  // config changed: forget previous progress
      manifest.config_hash = hash;
      manifest.seed = cfg.seed;
    }
  }

  void require(const fs::path& file, const std::string& stage) const {
    if (!fs::exists(file)) {
      throw MissingArtifact("stage '" + stage + "' needs missing input: " +
                            file.string());
    }
  }

  void complete(const std::string& stage, const std::vector<fs::path>& files) {
    for (const fs::path& f : files) manifest.record_file(art.out_dir, f);
    manifest.stages[stage] = true;
    manifest.save(art.manifest);
  }
};

// Maps [0, n) over `workers` threads; any exception is rethrown on the
// caller with its sample id. Output ordering is the caller's business,
// which keeps results identical for any worker count.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::mutex err_mutex;
  std::optional<std::pair<std::size_t, std::string>> first_error;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error || i < first_error->first) {
            first_error = {i, e.what()};
          }
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) {
    throw StageError("sample " + std::to_string(first_error->first) + ": " +
                     first_error->second);
  }
}

// ---------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------

void stage_sample(StageContext& ctx) {
  doe::DoeMatrix m =
      doe::lhs_sample(ctx.cfg.space, ctx.cfg.n_samples, ctx.cfg.doe_seed());
  doe::write_doe_file(m, ctx.art.doe_csv.string());
  ctx.complete("sample", {ctx.art.doe_csv});
}

// ---------------------------------------------------------------------
// simulate: forming gate + crash metrics per sample
// ---------------------------------------------------------------------

struct SimRow {
  forming::FormingOutcome forming;
  metrics::CrashMetrics metrics;  // valid when forming.feasible
};

metrics::CrashMetrics noisy_oracle(const doe::DesignPoint& p,
                                   const RunConfig& cfg, std::size_t id) {
  metrics::CrashMetrics m = crashsim::reference_oracle(p);
  if (cfg.data_source == DataSource::oracle_noisy) {
    Rng rng(substream_seed(cfg.noise_seed(), id));
    m.cle *= 1.0 + cfg.noise_sigma_rel * rng.normal();
    m.ea *= 1.0 + cfg.noise_sigma_rel * rng.normal();
    m.intrusion *= 1.0 + cfg.noise_sigma_rel * rng.normal();
    m.decel *= 1.0 + cfg.noise_sigma_rel * rng.normal();
  }
  return m;
}

void stage_simulate(StageContext& ctx) {
  ctx.require(ctx.art.doe_csv, "simulate");
  const RunConfig& cfg = ctx.cfg;
  doe::DoeMatrix m = doe::read_doe_file(ctx.art.doe_csv.string(), cfg.space);
  std::size_t n = m.points.size();
  std::vector<SimRow> rows(n);

  fs::path trace_dir = ctx.art.out_dir / "traces";
  bool surrogate = cfg.data_source == DataSource::surrogate;
  if (surrogate &&
      (cfg.save_traces || cfg.report_trace_sample >= 0)) {
    fs::create_directories(trace_dir);
  }

  std::vector<fs::path> trace_files;
  std::mutex trace_mutex;

  parallel_for(n, cfg.workers, [&](std::size_t i) {
    const doe::DesignPoint& p = m.points[i];
    SimRow& row = rows[i];
    row.forming = forming::forming_feasibility(p, cfg.geometry,
                                               cfg.forming_weights);
    if (!cfg.forming_enabled) {
      row.forming.feasible = true;
    }
    if (!row.forming.feasible) return;

    if (surrogate) {
      crashsim::RomModel rom =
          crashsim::build_rom(p, row.forming, cfg.material, cfg.geometry,
                              cfg.solver);
      crashsim::CrashTrace tr = crashsim::integrate(
          rom, cfg.solver.impact_velocity, cfg.solver.duration,
          cfg.solver.dt_out, cfg.solver.cfl_fraction);
      row.metrics = metrics::extract_metrics(tr);
      bool want_trace =
          cfg.save_traces ||
          static_cast<long long>(i) == cfg.report_trace_sample;
      if (want_trace) {
        fs::path f = trace_dir / ("trace_" + std::to_string(i) + ".csv");
        crashsim::write_trace_file(tr, f.string());
        std::lock_guard<std::mutex> lock(trace_mutex);
        trace_files.push_back(f);
      }
    } else {
      row.metrics = noisy_oracle(p, cfg, i);
    }
  });

  // forming.csv covers every DOE row; metrics.csv only the formed ones
  std::ostringstream fcsv;
  fcsv << "sample_id,formed,knockdown,feasibility_score\n";
  std::ostringstream mcsv;
  mcsv << "sample_id,cle,ea_J,intrusion_mm,decel_mps2\n";
  for (std::size_t i = 0; i < n; ++i) {
    const SimRow& r = rows[i];
    fcsv << i << ',' << (r.forming.feasible ? 1 : 0) << ','
         << fmt_g9(r.forming.knockdown) << ','
         << fmt_g9(r.forming.feasibility_score) << "\n";
    if (r.forming.feasible) {
      mcsv << i << ',' << fmt_g9(r.metrics.cle) << ',' << fmt_g9(r.metrics.ea)
           << ',' << fmt_g9(r.metrics.intrusion) << ','
           << fmt_g9(r.metrics.decel) << "\n";
    }
  }
  write_file(ctx.art.forming_csv.string(), fcsv.str());
  write_file(ctx.art.metrics_csv.string(), mcsv.str());

  std::vector<fs::path> outputs = {ctx.art.forming_csv, ctx.art.metrics_csv};
  std::sort(trace_files.begin(), trace_files.end());
  outputs.insert(outputs.end(), trace_files.begin(), trace_files.end());
  ctx.complete("simulate", outputs);
}

// ---------------------------------------------------------------------
// extract: join doe + forming + metrics into the dataset
// ---------------------------------------------------------------------

constexpr const char* kDatasetHeader =
    "sample_id,n_layers,thickness_mm,orientation_set,punch_velocity_mps,"
    "layer_temp_C,tool_temp_C,air_temp_C,formed,knockdown,feasibility_score,"
    "cle,ea_J,intrusion_mm,decel_mps2";

void stage_extract(StageContext& ctx) {
  ctx.require(ctx.art.doe_csv, "extract");
  ctx.require(ctx.art.forming_csv, "extract");
  ctx.require(ctx.art.metrics_csv, "extract");

  doe::DoeMatrix m =
      doe::read_doe_file(ctx.art.doe_csv.string(), ctx.cfg.space);

  // forming rows
  struct FormingRow {
    int formed = 0;
    double knockdown = 1.0;
    double score = 0.0;
  };
  std::map<std::size_t, FormingRow> forming_rows;
  {
    std::ifstream in(ctx.art.forming_csv);
    std::string line;
    std::getline(in, line);  // header
    std::size_t rowno = 0;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto f = split_csv(line);
      if (f.size() != 4) {
        throw ParseError("forming.csv row " + std::to_string(rowno) +
                         ": expected 4 fields");
      }
      std::size_t id = static_cast<std::size_t>(
          parse_int_field(f[0], rowno, "sample_id"));
      FormingRow fr;
      fr.formed = static_cast<int>(parse_int_field(f[1], rowno, "formed"));
      fr.knockdown = parse_double_field(f[2], rowno, "knockdown");
      fr.score = parse_double_field(f[3], rowno, "feasibility_score");
      forming_rows[id] = fr;
      ++rowno;
    }
  }

  std::map<std::size_t, metrics::CrashMetrics> metric_rows;
  {
    std::ifstream in(ctx.art.metrics_csv);
    std::string line;
    std::getline(in, line);
    std::size_t rowno = 0;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto f = split_csv(line);
      if (f.size() != 5) {
        throw ParseError("metrics.csv row " + std::to_string(rowno) +
                         ": expected 5 fields");
      }
      std::size_t id = static_cast<std::size_t>(
          parse_int_field(f[0], rowno, "sample_id"));
      metrics::CrashMetrics mm;
      mm.cle = parse_double_field(f[1], rowno, "cle");
      mm.ea = parse_double_field(f[2], rowno, "ea_J");
      mm.intrusion = parse_double_field(f[3], rowno, "intrusion_mm");
      mm.decel = parse_double_field(f[4], rowno, "decel_mps2");
      metric_rows[id] = mm;
      ++rowno;
    }
  }

  std::ostringstream csv;
  csv << kDatasetHeader << "\n";
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    auto fit = forming_rows.find(i);
    if (fit == forming_rows.end()) {
      throw StageError("extract: sample " + std::to_string(i) +
                       " missing from forming.csv");
    }
    if (!fit->second.formed) continue;  // attrition: unformed rows drop out
    auto mit = metric_rows.find(i);
    if (mit == metric_rows.end()) {
      throw StageError("extract: formed sample " + std::to_string(i) +
                       " missing from metrics.csv");
    }
    const doe::DesignPoint& p = m.points[i];
    const metrics::CrashMetrics& mm = mit->second;
    csv << i << ',' << p.n_layers << ',' << fmt_g9(p.thickness) << ','
        << doe::to_string(p.orientation) << ',' << fmt_g9(p.punch_velocity)
        << ',' << fmt_g9(p.layer_temp) << ',' << fmt_g9(p.tool_temp) << ','
        << fmt_g9(p.air_temp) << ",1," << fmt_g9(fit->second.knockdown) << ','
        << fmt_g9(fit->second.score) << ',' << fmt_g9(mm.cle) << ','
        << fmt_g9(mm.ea) << ',' << fmt_g9(mm.intrusion) << ','
        << fmt_g9(mm.decel) << "\n";
  }
  write_file(ctx.art.dataset_csv.string(), csv.str());
  ctx.complete("extract", {ctx.art.dataset_csv});
}

// ---------------------------------------------------------------------
// learners shared by tune/train
// ---------------------------------------------------------------------

ml::Learner make_learner(const std::string& family, const ml::ParamMap& params,
                         const RunConfig& cfg) {
  if (family == "rf") {
    ml::ForestParams fp;
    fp.n_trees = static_cast<int>(params.at("n_trees"));
    fp.max_depth = static_cast<int>(params.at("max_depth"));
    fp.min_samples_leaf = cfg.ml.min_samples_leaf;
    fp.features_per_split = cfg.ml.rf_features_per_split;
    fp.seed = cfg.forest_seed();
    return [fp](const ml::Matrix& X, const std::vector<double>& y) {
      auto model = std::make_shared<ml::Ensemble>(ml::fit_random_forest(X, y, fp));
      return [model](const ml::Matrix& Xt) { return model->predict(Xt); };
    };
  }
  ml::GbtParams gp;
  gp.n_rounds = static_cast<int>(params.at("n_rounds"));
  gp.learning_rate = params.at("learning_rate");
  gp.max_depth = static_cast<int>(params.at("max_depth"));
  gp.min_samples_leaf = cfg.ml.min_samples_leaf;
  bool regularized = family == "xgb";
  if (regularized) gp.lambda = params.at("lambda");
  return [gp, regularized](const ml::Matrix& X, const std::vector<double>& y) {
    auto model = std::make_shared<ml::Ensemble>(
        ml::fit_gradient_boosting(X, y, gp, regularized));
    return [model](const ml::Matrix& Xt) { return model->predict(Xt); };
  };
}

ml::ParamGrid family_grid(const std::string& family, const MlConfig& mc) {
  if (family == "rf") {
    return {{"n_trees", mc.rf_trees}, {"max_depth", mc.rf_depths}};
  }
  ml::ParamGrid grid = {{"max_depth", mc.gbt_depths},
                        {"learning_rate", mc.gbt_learning_rates},
                        {"n_rounds", mc.gbt_rounds}};
  if (family == "xgb") grid.emplace_back("lambda", mc.xgb_lambdas);
  return grid;
}

ml::ParamMap default_params(const std::string& family) {
  if (family == "rf") return {{"n_trees", 300}, {"max_depth", 4}};
  ml::ParamMap p = {{"max_depth", 3}, {"learning_rate", 0.1}, {"n_rounds", 300}};
  if (family == "xgb") p["lambda"] = 1.0;
  return p;
}

const std::vector<std::string>& families() {
  static const std::vector<std::string> kFamilies = {"gbt", "xgb", "rf"};
  return kFamilies;
}

// ---------------------------------------------------------------------
// tune
// ---------------------------------------------------------------------

void stage_tune(StageContext& ctx) {
  ctx.require(ctx.art.dataset_csv, "tune");
  const RunConfig& cfg = ctx.cfg;
  ml::Dataset ds = load_dataset_csv(ctx.art.dataset_csv);
  auto [train, test] =
      ml::train_test_split(ds, cfg.ml.test_fraction, cfg.split_seed());

  json out;
  for (const std::string& target : ml::target_names()) {
    const std::vector<double>& y = train.y.at(target);
    for (const std::string& family : families()) {
      ml::GridSearchResult res = ml::grid_search(
          train.X, y, family_grid(family, cfg.ml), cfg.ml.cv_folds,
          cfg.split_seed(),
          [&](const ml::ParamMap& p) { return make_learner(family, p, cfg); });
      out[target][family]["params"] = res.best_params;
      out[target][family]["cv_mae"] = res.best_report.mean.mae;
      out[target][family]["cv_mape"] = res.best_report.mean.mape;
      out[target][family]["cv_r2"] = res.best_report.mean.r2;
    }
  }
  std::ofstream f(ctx.art.tuned_params, std::ios::binary);
  if (!f) throw Error("cannot write " + ctx.art.tuned_params.string());
  f << out.dump(1) << "\n";
  f.close();
  ctx.complete("tune", {ctx.art.tuned_params});
}

// ---------------------------------------------------------------------
// train
// ---------------------------------------------------------------------

void stage_train(StageContext& ctx) {
  ctx.require(ctx.art.dataset_csv, "train");
  const RunConfig& cfg = ctx.cfg;
  ml::Dataset ds = load_dataset_csv(ctx.art.dataset_csv);
  auto [train, test] =
      ml::train_test_split(ds, cfg.ml.test_fraction, cfg.split_seed());

  // tuned hyperparameters are used when the tune stage ran
  json tuned;
  if (fs::exists(ctx.art.tuned_params)) {
    std::ifstream in(ctx.art.tuned_params);
    try {
      in >> tuned;
    } catch (const json::exception& e) {
      throw StageError(std::string("train: unreadable tuned_params.json: ") +
                       e.what());
    }
  }

  fs::path model_dir = ctx.art.out_dir / "models";
  fs::create_directories(model_dir);

  json report;
  report["split"] = {{"train", train.size()}, {"test", test.size()}};
  std::ostringstream pred_csv;
  pred_csv << "sample_id,target,y_true,y_pred\n";
  std::ostringstream imp_csv;
  imp_csv << "target,feature,importance\n";
  std::vector<fs::path> outputs;

  for (const std::string& target : ml::target_names()) {
    const std::vector<double>& ytr = train.y.at(target);
    const std::vector<double>& yte = test.y.at(target);
    for (const std::string& family : families()) {
      ml::ParamMap params = default_params(family);
      if (tuned.contains(target) && tuned[target].contains(family)) {
        params = tuned[target][family]["params"].get<ml::ParamMap>();
      }

      // final model on the training split
      ml::Ensemble model;
      if (family == "rf") {
        ml::ForestParams fp;
        fp.n_trees = static_cast<int>(params.at("n_trees"));
        fp.max_depth = static_cast<int>(params.at("max_depth"));
        fp.min_samples_leaf = cfg.ml.min_samples_leaf;
        fp.features_per_split = cfg.ml.rf_features_per_split;
        fp.seed = cfg.forest_seed();
        model = ml::fit_random_forest(train.X, ytr, fp);
      } else {
        ml::GbtParams gp;
        gp.n_rounds = static_cast<int>(params.at("n_rounds"));
        gp.learning_rate = params.at("learning_rate");
        gp.max_depth = static_cast<int>(params.at("max_depth"));
        gp.min_samples_leaf = cfg.ml.min_samples_leaf;
        if (family == "xgb") gp.lambda = params.at("lambda");
        model = ml::fit_gradient_boosting(train.X, ytr, gp, family == "xgb");
      }

      ml::CvReport cv =
          ml::kfold_cv(train.X, ytr, cfg.ml.cv_folds, cfg.split_seed(),
                       make_learner(family, params, cfg));
      std::vector<double> pred = model.predict(test.X);
      ml::EvalReport holdout = ml::eval_metrics(yte, pred);

      json& r = report["targets"][target][family];
      r["params"] = params;
      r["cv"] = {{"mae", cv.mean.mae},
                 {"mape", cv.mean.mape},
                 {"r2", cv.mean.r2}};
      r["holdout"] = {{"mae", holdout.mae},
                      {"mape", holdout.mape},
                      {"r2", holdout.r2}};

      fs::path model_path = model_dir / (family + "_" + target + ".json");
      ml::save_ensemble(model, model_path.string());
      outputs.push_back(model_path);

      if (family == "xgb") {
        for (std::size_t i = 0; i < test.size(); ++i) {
          long long id =
              test.sample_ids.empty() ? static_cast<long long>(i)
                                      : test.sample_ids[i];
          pred_csv << id << ',' << target << ',' << fmt_g9(yte[i]) << ','
                   << fmt_g9(pred[i]) << "\n";
        }
        auto importance = ml::feature_importance(model, ds.feature_names);
        for (const std::string& fname : ds.feature_names) {
          imp_csv << target << ',' << fname << ','
                  << fmt_g9(importance.at(fname)) << "\n";
        }
      }
    }
  }

  write_file(ctx.art.predictions_csv.string(), pred_csv.str());
  write_file(ctx.art.importance_csv.string(), imp_csv.str());
  {
    std::ofstream f(ctx.art.eval_report, std::ios::binary);
    if (!f) throw Error("cannot write " + ctx.art.eval_report.string());
    f << report.dump(1) << "\n";
  }
  outputs.push_back(ctx.art.predictions_csv);
  outputs.push_back(ctx.art.importance_csv);
  outputs.push_back(ctx.art.eval_report);
  ctx.complete("train", outputs);
}

// ---------------------------------------------------------------------
// symreg
// ---------------------------------------------------------------------

void stage_symreg(StageContext& ctx) {
  ctx.require(ctx.art.dataset_csv, "symreg");
  const RunConfig& cfg = ctx.cfg;
  ml::Dataset ds = load_dataset_csv(ctx.art.dataset_csv);
  ml::Dataset view = symreg_view(ds);
  if (view.size() < 10) {
    throw StageError("symreg: fewer than 10 type-B rows in the dataset");
  }

  std::vector<fs::path> outputs;
  const auto& targets = ml::target_names();
  for (std::size_t t = 0; t < targets.size(); ++t) {
    symreg::SymregConfig sc = cfg.symreg_cfg;
    sc.seed = cfg.symreg_seed() + t;
    symreg::ParetoFront front = symreg::evolve(view.X, view.y.at(targets[t]), sc);
    fs::path out = ctx.art.pareto_csvs.at(targets[t]);
    write_file(out.string(), front.to_csv());
    outputs.push_back(out);
  }
  ctx.complete("symreg", outputs);
}

// ---------------------------------------------------------------------
// report
// ---------------------------------------------------------------------

void stage_report(StageContext& ctx) {
  std::vector<fs::path> outputs = emit_report(ctx.cfg);
  ctx.complete("report", outputs);
}

using StageFn = void (*)(StageContext&);

const std::map<std::string, StageFn>& stage_table() {
  static const std::map<std::string, StageFn> kTable = {
      {"sample", stage_sample}, {"simulate", stage_simulate},
      {"extract", stage_extract}, {"tune", stage_tune},
      {"train", stage_train},   {"symreg", stage_symreg},
      {"report", stage_report},
  };
  return kTable;
}

// The files that mark a stage as complete.
std::vector<fs::path> stage_outputs(const std::string& name,
                                    const RunArtifacts& art) {
  if (name == "sample") return {art.doe_csv};
  if (name == "simulate") return {art.forming_csv, art.metrics_csv};
  if (name == "extract") return {art.dataset_csv};
  if (name == "tune") return {art.tuned_params};
  if (name == "train") {
    return {art.eval_report, art.predictions_csv, art.importance_csv};
  }
  if (name == "symreg") {
    std::vector<fs::path> out;
    for (const auto& [_, p] : art.pareto_csvs) out.push_back(p);
    return out;
  }
  return {};
}

}  // namespace

void run_stage(const std::string& name, const RunConfig& cfg) {
  cfg.validate();
  auto it = stage_table().find(name);
  if (it == stage_table().end()) {
    throw InvalidArgument("unknown stage: '" + name + "'");
  }
  StageContext ctx(cfg);
  try {
    it->second(ctx);
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError("stage '" + name + "': " + e.what());
  }
}

RunArtifacts run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  StageContext ctx(cfg);
  for (const std::string& name : stage_names()) {
    bool done = ctx.manifest.stages.count(name) &&
                ctx.manifest.stages.at(name);
    if (done) {
      bool outputs_present = true;
      for (const fs::path& f : stage_outputs(name, ctx.art)) {
        if (!fs::exists(f)) outputs_present = false;
      }
      if (outputs_present) continue;  // resume: stage already ran
    }
    try {
      stage_table().at(name)(ctx);
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError("stage '" + name + "': " + e.what());
    }
  }
  return ctx.art;
}

// ---------------------------------------------------------------------
// dataset loading
// ---------------------------------------------------------------------

ml::Dataset load_dataset_csv(const fs::path& path) {
  if (!fs::exists(path)) {
    throw MissingArtifact("dataset file missing: " + path.string());
  }
  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("dataset file empty: " + path.string());
  }
  if (trim(line) != kDatasetHeader) {
    throw ParseError("dataset file has unexpected header: " + path.string());
  }

  ml::Dataset ds;
  ds.feature_names = ml::default_feature_names();
  std::vector<std::array<double, 7>> xrows;
  std::map<std::string, std::vector<double>> ymap;
  for (const std::string& t : ml::target_names()) ymap[t] = {};

  std::size_t rowno = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 15) {
      throw ParseError("dataset row " + std::to_string(rowno) +
                       ": expected 15 fields, got " +
                       std::to_string(f.size()));
    }
    ds.sample_ids.push_back(parse_int_field(f[0], rowno, "sample_id"));
    std::array<double, 7> x{};
    x[0] = static_cast<double>(parse_int_field(f[1], rowno, "n_layers"));
    x[1] = parse_double_field(f[2], rowno, "thickness_mm");
    std::string ori = trim(f[3]);
    if (ori != "A" && ori != "B") {
      throw ParseError("dataset row " + std::to_string(rowno) +
                       ", column 'orientation_set': unknown label '" + ori +
                       "'");
    }
    x[2] = ori == "A" ? 0.0 : 1.0;
    x[3] = parse_double_field(f[4], rowno, "punch_velocity_mps");
    x[4] = parse_double_field(f[5], rowno, "layer_temp_C");
    x[5] = parse_double_field(f[6], rowno, "tool_temp_C");
    x[6] = parse_double_field(f[7], rowno, "air_temp_C");
    xrows.push_back(x);
    ymap["cle"].push_back(parse_double_field(f[11], rowno, "cle"));
    ymap["ea"].push_back(parse_double_field(f[12], rowno, "ea_J"));
    ymap["intrusion"].push_back(
        parse_double_field(f[13], rowno, "intrusion_mm"));
    ymap["decel"].push_back(parse_double_field(f[14], rowno, "decel_mps2"));
    ++rowno;
  }

  ds.X = ml::Matrix(xrows.size(), 7);
  for (std::size_t r = 0; r < xrows.size(); ++r) {
    for (std::size_t c = 0; c < 7; ++c) ds.X.at(r, c) = xrows[r][c];
  }
  ds.y = std::move(ymap);
  return ds;
}

ml::Dataset symreg_view(const ml::Dataset& full) {
  ml::Dataset view;
  view.feature_names = {"a", "b", "c", "d"};
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < full.size(); ++r) {
    if (full.X.at(r, 2) == 1.0) rows.push_back(r);  // orientation B
  }
  view.X = ml::Matrix(rows.size(), 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    view.X.at(i, 0) = full.X.at(rows[i], 0);  // a = n_layers
    view.X.at(i, 1) = full.X.at(rows[i], 1);  // b = thickness
    view.X.at(i, 2) = full.X.at(rows[i], 4);  // c = layer temp
    view.X.at(i, 3) = full.X.at(rows[i], 5);  // d = tool temp
  }
  for (const auto& [name, col] : full.y) {
    std::vector<double> v(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) v[i] = col[rows[i]];
    view.y[name] = std::move(v);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    view.sample_ids.push_back(full.sample_ids.empty()
                                  ? static_cast<long long>(rows[i])
                                  : full.sample_ids[rows[i]]);
  }
  return view;
}

}  // namespace crashforge::pipeline
