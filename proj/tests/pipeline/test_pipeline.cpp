#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crashforge/config.hpp"
#include "crashforge/errors.hpp"
#include "crashforge/pipeline.hpp"
#include "crashforge/report.hpp"
#include "crashforge/textio.hpp"

using namespace crashforge;
namespace fs = std::filesystem;
using pipeline::RunConfig;

namespace {

RunConfig tiny_config(const std::string& out_dir) {
  RunConfig cfg;
  cfg.seed = 11;
  cfg.n_samples = 48;
  cfg.data_source = pipeline::DataSource::oracle;
  cfg.out_dir = out_dir;
  // light learning budgets keep the integration run quick
  cfg.ml.gbt_depths = {2, 3};
  cfg.ml.gbt_learning_rates = {0.1};
  cfg.ml.gbt_rounds = {60};
  cfg.ml.xgb_lambdas = {1};
  cfg.ml.rf_trees = {30};
  cfg.ml.rf_depths = {4};
  cfg.symreg_cfg.population = 50;
  cfg.symreg_cfg.generations = 6;
  cfg.symreg_cfg.restarts = 2;
  cfg.symreg_cfg.polish_top = 4;
  return cfg;
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t data_rows(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::size_t rows = 0;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    ++rows;
  }
  return rows;
}

}  // namespace

TEST_CASE("tiny oracle run produces the full artifact set") {
  fs::path dir = fresh_dir("crashforge_pipe_a");
  RunConfig cfg = tiny_config(dir.string());
  pipeline::RunArtifacts art = pipeline::run_pipeline(cfg);

  CHECK(fs::exists(art.doe_csv));
  CHECK(fs::exists(art.forming_csv));
  CHECK(fs::exists(art.dataset_csv));
  CHECK(fs::exists(art.tuned_params));
  CHECK(fs::exists(art.eval_report));
  CHECK(fs::exists(art.predictions_csv));
  CHECK(fs::exists(art.importance_csv));
  CHECK(fs::exists(art.manifest));
  for (const auto& [target, path] : art.pareto_csvs) CHECK(fs::exists(path));
  CHECK(fs::exists(dir / "parity_ea.svg"));
  CHECK(fs::exists(dir / "importance_cle.svg"));
  CHECK(fs::exists(dir / "pareto_decel.svg"));

  // row accounting: doe rows = formed + unformed; dataset = formed rows
  std::size_t doe_rows = data_rows(art.doe_csv);
  CHECK(doe_rows == 48);
  std::size_t formed = 0, unformed = 0;
  {
    std::ifstream in(art.forming_csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto f = split_csv(line);
      (f[1] == "1" ? formed : unformed)++;
    }
  }
  CHECK(formed + unformed == doe_rows);
  CHECK(data_rows(art.dataset_csv) == formed);
  CHECK(data_rows(art.dataset_csv) <= 48);

  // dataset carries the four populated target columns
  ml::Dataset ds = pipeline::load_dataset_csv(art.dataset_csv);
  for (const std::string& t : ml::target_names()) {
    REQUIRE(ds.y.count(t) == 1);
    CHECK(ds.y.at(t).size() == ds.size());
  }

  // importance normalization survives the CSV trip
  {
    std::ifstream in(art.importance_csv);
    std::string line;
    std::getline(in, line);
    std::map<std::string, double> sums;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto f = split_csv(line);
      sums[f[0]] += parse_double_field(f[2], 0, "importance");
    }
    REQUIRE(sums.size() == 4);
    for (const auto& [target, sum] : sums) {
      CAPTURE(target);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("reruns are byte-identical; resume skips finished stages") {
  fs::path dir1 = fresh_dir("crashforge_pipe_b1");
  fs::path dir2 = fresh_dir("crashforge_pipe_b2");
  RunConfig cfg1 = tiny_config(dir1.string());
  RunConfig cfg2 = tiny_config(dir2.string());

  pipeline::RunArtifacts a1 = pipeline::run_pipeline(cfg1);
  pipeline::RunArtifacts a2 = pipeline::run_pipeline(cfg2);

  CHECK(read_file(a1.dataset_csv.string()) ==
        read_file(a2.dataset_csv.string()));
  CHECK(read_file(a1.doe_csv.string()) == read_file(a2.doe_csv.string()));
  CHECK(read_file(a1.predictions_csv.string()) ==
        read_file(a2.predictions_csv.string()));
  for (const auto& [t, p] : a1.pareto_csvs) {
    CHECK(read_file(p.string()) ==
          read_file(a2.pareto_csvs.at(t).string()));
  }

  // manifests agree on every checksum (paths differ only by directory)
  std::string m1 = read_file(a1.manifest.string());
  std::string m2 = read_file(a2.manifest.string());
  CHECK(m1 == m2);

  // resumed run leaves outputs untouched
  auto stamp = fs::last_write_time(a1.dataset_csv);
  pipeline::run_pipeline(cfg1);
  CHECK(fs::last_write_time(a1.dataset_csv) == stamp);
}

TEST_CASE("worker count does not change the dataset bytes") {
  fs::path dir1 = fresh_dir("crashforge_pipe_w1");
  fs::path dir3 = fresh_dir("crashforge_pipe_w3");
  RunConfig c1 = tiny_config(dir1.string());
  c1.data_source = pipeline::DataSource::surrogate;
  c1.workers = 1;
  RunConfig c3 = tiny_config(dir3.string());
  c3.data_source = pipeline::DataSource::surrogate;
  c3.workers = 3;

  pipeline::run_stage("sample", c1);
  pipeline::run_stage("simulate", c1);
  pipeline::run_stage("extract", c1);
  pipeline::run_stage("sample", c3);
  pipeline::run_stage("simulate", c3);
  pipeline::run_stage("extract", c3);

  CHECK(read_file((dir1 / "dataset.csv").string()) ==
        read_file((dir3 / "dataset.csv").string()));
}

TEST_CASE("oracle_noisy is deterministic per seed and differs across seeds") {
  fs::path dir1 = fresh_dir("crashforge_pipe_n1");
  fs::path dir2 = fresh_dir("crashforge_pipe_n2");
  RunConfig c1 = tiny_config(dir1.string());
  c1.data_source = pipeline::DataSource::oracle_noisy;
  RunConfig c2 = tiny_config(dir2.string());
  c2.data_source = pipeline::DataSource::oracle_noisy;
  c2.seed = 12;

  for (auto* c : {&c1, &c2}) {
    pipeline::run_stage("sample", *c);
    pipeline::run_stage("simulate", *c);
    pipeline::run_stage("extract", *c);
  }
  CHECK(read_file((dir1 / "dataset.csv").string()) !=
        read_file((dir2 / "dataset.csv").string()));
}

TEST_CASE("stage dependency errors name the missing artifact") {
  fs::path dir = fresh_dir("crashforge_pipe_dep");
  RunConfig cfg = tiny_config(dir.string());
  CHECK_THROWS_AS(pipeline::run_stage("simulate", cfg), StageError);
  CHECK_THROWS_AS(pipeline::run_stage("train", cfg), StageError);
}

TEST_CASE("report on a perfect predictions file annotates R^2 = 1.000") {
  fs::path dir = fresh_dir("crashforge_pipe_rep");
  RunConfig cfg = tiny_config(dir.string());
  pipeline::run_pipeline(cfg);

  // overwrite predictions with the identity fit
  pipeline::RunArtifacts art = pipeline::RunArtifacts::layout(dir);
  {
    ml::Dataset ds = pipeline::load_dataset_csv(art.dataset_csv);
    std::ostringstream csv;
    csv << "sample_id,target,y_true,y_pred\n";
    for (const std::string& t : ml::target_names()) {
      for (std::size_t i = 0; i < std::min<std::size_t>(10, ds.size()); ++i) {
        double v = ds.y.at(t)[i];
        csv << ds.sample_ids[i] << ',' << t << ',' << fmt_g9(v) << ','
            << fmt_g9(v) << "\n";
      }
    }
    write_file(art.predictions_csv.string(), csv.str());
  }
  pipeline::emit_report(cfg);
  std::string svg = read_file((dir / "parity_ea.svg").string());
  CHECK(svg.find("R^2 = 1.000") != std::string::npos);
}

TEST_CASE("report refuses to run with a missing or empty artifact") {
  fs::path dir = fresh_dir("crashforge_pipe_miss");
  RunConfig cfg = tiny_config(dir.string());
  pipeline::run_pipeline(cfg);

  fs::path model = dir / "models" / "xgb_cle.json";
  REQUIRE(fs::exists(model));
  write_file(model.string(), "");  // truncate to empty
  CHECK_THROWS_WITH_AS(pipeline::emit_report(cfg),
                       doctest::Contains("xgb_cle"), MissingArtifact);
}

TEST_CASE("trace plots are emitted for surrogate runs") {
  fs::path dir = fresh_dir("crashforge_pipe_tr");
  RunConfig cfg = tiny_config(dir.string());
  cfg.data_source = pipeline::DataSource::surrogate;
  cfg.report_trace_sample = 1;
  pipeline::run_pipeline(cfg);
  // sample 1 may be unformed; the trace exists only when it simulated
  fs::path trace = dir / "traces" / "trace_1.csv";
  if (fs::exists(trace)) {
    CHECK(fs::exists(dir / "trace_force.svg"));
    CHECK(fs::exists(dir / "trace_energy.svg"));
  }
}

TEST_CASE("the command-line binary wires stages, config and exit codes") {
  fs::path dir = fresh_dir("crashforge_pipe_cli");
  fs::path cfg_file = dir / "run.cfg";
  write_file(cfg_file.string(),
             "doe.n_samples = 12\ndata.source = oracle\n");

  std::string base = std::string(CRASHFORGE_BIN);
  auto run = [&](const std::string& args) {
    std::string cmd = base + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };

  CHECK(run("sample --config " + cfg_file.string() + " --out " +
            (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "doe.csv"));

  // config error -> 2
  write_file(cfg_file.string(), "doe.bogus_key = 1\n");
  CHECK(run("sample --config " + cfg_file.string()) == 2);

  // stage failure (missing inputs) -> 3
  CHECK(run("train --out " + (dir / "empty").string()) == 3);

  // CLI parse error -> 2
  CHECK(run("no_such_subcommand") == 2);
}
