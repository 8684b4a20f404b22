// crashforge — design-space exploration for thermoformed composite battery
// enclosures: LHS sampling, a forming gate, a reduced-order side-pole
// impact model, crashworthiness metrics, tree-ensemble learning and
// symbolic regression, with CSV/SVG reporting.
//
//   crashforge run      --config run.cfg --out out/
//   crashforge sample   --out out/           # DOE only
//   crashforge simulate --workers 8 --out out/
//
// Exit codes: 0 success, 2 configuration error, 3 stage failure.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "crashforge/config.hpp"
#include "crashforge/errors.hpp"
#include "crashforge/pipeline.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int workers = 0;
  bool seed_set = false;
  bool workers_set = false;
};

crashforge::pipeline::RunConfig effective_config(const CliOptions& opts) {
  crashforge::pipeline::RunConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = crashforge::pipeline::parse_config_file(opts.config_path);
  }
  if (opts.seed_set) cfg.seed = opts.seed;
  if (opts.workers_set) cfg.workers = opts.workers;
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crashforge: composite battery-enclosure crashworthiness "
               "exploration pipeline"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  CliOptions opts;
  app.add_option("--config", opts.config_path, "flat key=value config file")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", opts.seed, "base seed (overrides config)")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  app.add_option("--workers", opts.workers,
                 "simulation worker threads (overrides config)")
      ->each([&opts](const std::string&) { opts.workers_set = true; });
  app.add_option("--out", opts.out_dir, "output directory (overrides config)");

  // one subcommand per stage, plus `run` for the whole chain
  for (const std::string& stage : crashforge::pipeline::stage_names()) {
    app.add_subcommand(stage, "run the '" + stage + "' stage");
  }
  CLI::App* run = app.add_subcommand("run", "run every stage in order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    crashforge::pipeline::RunConfig cfg = effective_config(opts);
    if (run->parsed()) {
      crashforge::pipeline::RunArtifacts art =
          crashforge::pipeline::run_pipeline(cfg);
      std::printf("run complete: %s (config %s)\n",
                  art.out_dir.string().c_str(), cfg.config_hash().c_str());
    } else {
      for (const std::string& stage : crashforge::pipeline::stage_names()) {
        if (app.get_subcommand(stage)->parsed()) {
          crashforge::pipeline::run_stage(stage, cfg);
          std::printf("stage '%s' complete\n", stage.c_str());
        }
      }
    }
  } catch (const crashforge::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const crashforge::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
  return 0;
}
