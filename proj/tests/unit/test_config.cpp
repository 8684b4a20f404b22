#include <doctest.h>

#include "crashforge/config.hpp"
#include "crashforge/errors.hpp"

using namespace crashforge;
using pipeline::RunConfig;

TEST_CASE("defaults validate and hash stably") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  std::string h1 = cfg.config_hash();
  CHECK(h1 == RunConfig{}.config_hash());
  cfg.seed = 43;
  CHECK(cfg.config_hash() != h1);
}

TEST_CASE("parsing key=value text") {
  RunConfig cfg = pipeline::parse_config_text(
      "# comment\n"
      "\n"
      "doe.n_samples = 25\n"
      "seed = 7\n"
      "data.source = oracle_noisy\n"
      "data.noise_sigma_rel = 0.02\n"
      "space.thickness_max = 0.5\n"
      "ml.gbt.depths = 2,5\n"
      "forming.enabled = false\n"
      "symreg.population = 50\n");
  CHECK(cfg.n_samples == 25);
  CHECK(cfg.seed == 7);
  CHECK(cfg.data_source == pipeline::DataSource::oracle_noisy);
  CHECK(cfg.noise_sigma_rel == doctest::Approx(0.02));
  CHECK(cfg.space.thickness.hi == doctest::Approx(0.5));
  CHECK(cfg.ml.gbt_depths == std::vector<double>{2, 5});
  CHECK(cfg.forming_enabled == false);
  CHECK(cfg.symreg_cfg.population == 50);
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_WITH_AS(pipeline::parse_config_text("doe.nsamples = 10\n"),
                       doctest::Contains("unknown key"), ConfigError);
}

TEST_CASE("malformed values are rejected") {
  CHECK_THROWS_AS(pipeline::parse_config_text("doe.n_samples = ten\n"),
                  ConfigError);
  CHECK_THROWS_AS(pipeline::parse_config_text("forming.enabled = maybe\n"),
                  ConfigError);
  CHECK_THROWS_AS(pipeline::parse_config_text("just a line\n"), ConfigError);
  CHECK_THROWS_AS(pipeline::parse_config_text("data.source = fea\n"),
                  ConfigError);
}

TEST_CASE("validation catches bad effective configs") {
  CHECK_THROWS_AS(pipeline::parse_config_text("doe.n_samples = 0\n"),
                  ConfigError);
  CHECK_THROWS_AS(pipeline::parse_config_text("workers = 0\n"), ConfigError);
  CHECK_THROWS_AS(pipeline::parse_config_text("ml.test_fraction = 1.5\n"),
                  ConfigError);
  CHECK_THROWS_AS(
      pipeline::parse_config_text("space.thickness_min = 0.9\n"),
      ConfigError);
}

TEST_CASE("canonical form covers parsed keys and round-trips") {
  RunConfig cfg = pipeline::parse_config_text("doe.n_samples = 123\n");
  std::string canon = cfg.canonical();
  CHECK(canon.find("doe.n_samples = 123") != std::string::npos);
  // canonical text reparses to the same hash
  RunConfig back = pipeline::parse_config_text(canon);
  CHECK(back.config_hash() == cfg.config_hash());
}
