#include "crashforge/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "crashforge/errors.hpp"
#include "crashforge/textio.hpp"

namespace crashforge::pipeline {

std::string to_string(DataSource s) {
  switch (s) {
    case DataSource::surrogate: return "surrogate";
    case DataSource::oracle: return "oracle";
    case DataSource::oracle_noisy: return "oracle_noisy";
  }
  return "surrogate";
}

DataSource data_source_from_string(const std::string& s) {
  if (s == "surrogate") return DataSource::surrogate;
  if (s == "oracle") return DataSource::oracle;
  if (s == "oracle_noisy") return DataSource::oracle_noisy;
  throw ConfigError("unknown data source: '" + s + "'");
}

namespace {

std::string fmt_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt_full(v[i]);
  }
  return out;
}

// One config key bound to a member of RunConfig.
struct Key {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

double parse_num(const std::string& key, const std::string& value) {
  std::string t = trim(value);
  double out = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || p != t.data() + t.size()) {
    throw ConfigError("key '" + key + "': not a number: '" + t + "'");
  }
  return out;
}

std::vector<double> parse_list(const std::string& key,
                               const std::string& value) {
  std::vector<double> out;
  for (const std::string& item : split_csv(value)) {
    out.push_back(parse_num(key, item));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  std::string t = trim(value);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError("key '" + key + "': expected true/false: '" + t + "'");
}

const std::map<std::string, Key>& key_table() {
  static const std::map<std::string, Key> table = [] {
    std::map<std::string, Key> t;
    auto num = [&t](const std::string& k, auto member) {
      t[k] = Key{[k, member](RunConfig& c, const std::string& v) {
                   c.*member = parse_num(k, v);
                 },
                 [member](const RunConfig& c) { return fmt_full(c.*member); }};
    };
    auto num_at = [&t](const std::string& k, auto getter) {
      // getter returns a double& given RunConfig&
      t[k] = Key{[k, getter](RunConfig& c, const std::string& v) {
                   getter(c) = parse_num(k, v);
                 },
                 [getter](const RunConfig& c) {
                   return fmt_full(getter(const_cast<RunConfig&>(c)));
                 }};
    };
    auto int_at = [&t](const std::string& k, auto getter) {
      t[k] = Key{[k, getter](RunConfig& c, const std::string& v) {
                   getter(c) = static_cast<int>(parse_num(k, v));
                 },
                 [getter](const RunConfig& c) {
                   return std::to_string(getter(const_cast<RunConfig&>(c)));
                 }};
    };
    auto size_at = [&t](const std::string& k, auto getter) {
      t[k] = Key{[k, getter](RunConfig& c, const std::string& v) {
                   getter(c) = static_cast<std::size_t>(parse_num(k, v));
                 },
                 [getter](const RunConfig& c) {
                   return std::to_string(getter(const_cast<RunConfig&>(c)));
                 }};
    };
    auto bool_at = [&t](const std::string& k, auto getter) {
      t[k] = Key{[k, getter](RunConfig& c, const std::string& v) {
                   getter(c) = parse_bool(k, v);
                 },
                 [getter](const RunConfig& c) {
                   return getter(const_cast<RunConfig&>(c)) ? "true" : "false";
                 }};
    };
    auto list_at = [&t](const std::string& k, auto getter) {
      t[k] = Key{[k, getter](RunConfig& c, const std::string& v) {
                   getter(c) = parse_list(k, v);
                 },
                 [getter](const RunConfig& c) {
                   return join_list(getter(const_cast<RunConfig&>(c)));
                 }};
    };

    t["seed"] = Key{[](RunConfig& c, const std::string& v) {
                      c.seed = static_cast<std::uint64_t>(parse_num("seed", v));
                    },
                    [](const RunConfig& c) { return std::to_string(c.seed); }};
    t["workers"] = Key{[](RunConfig& c, const std::string& v) {
                         c.workers = static_cast<int>(parse_num("workers", v));
                       },
                       [](const RunConfig& c) {
                         return std::to_string(c.workers);
                       }};
    t["out"] = Key{[](RunConfig& c, const std::string& v) { c.out_dir = trim(v); },
                   [](const RunConfig& c) { return c.out_dir; }};

    size_at("doe.n_samples", [](RunConfig& c) -> std::size_t& { return c.n_samples; });

    int_at("space.n_layers_min", [](RunConfig& c) -> int& { return c.space.n_layers_min; });
    int_at("space.n_layers_max", [](RunConfig& c) -> int& { return c.space.n_layers_max; });
    num_at("space.thickness_min", [](RunConfig& c) -> double& { return c.space.thickness.lo; });
    num_at("space.thickness_max", [](RunConfig& c) -> double& { return c.space.thickness.hi; });
    num_at("space.punch_velocity_min", [](RunConfig& c) -> double& { return c.space.punch_velocity.lo; });
    num_at("space.punch_velocity_max", [](RunConfig& c) -> double& { return c.space.punch_velocity.hi; });
    num_at("space.layer_temp_min", [](RunConfig& c) -> double& { return c.space.layer_temp.lo; });
    num_at("space.layer_temp_max", [](RunConfig& c) -> double& { return c.space.layer_temp.hi; });
    num_at("space.tool_temp_min", [](RunConfig& c) -> double& { return c.space.tool_temp.lo; });
    num_at("space.tool_temp_max", [](RunConfig& c) -> double& { return c.space.tool_temp.hi; });
    num_at("space.air_temp_min", [](RunConfig& c) -> double& { return c.space.air_temp.lo; });
    num_at("space.air_temp_max", [](RunConfig& c) -> double& { return c.space.air_temp.hi; });

    t["data.source"] = Key{[](RunConfig& c, const std::string& v) {
                             c.data_source = data_source_from_string(trim(v));
                           },
                           [](const RunConfig& c) {
                             return to_string(c.data_source);
                           }};
    num("data.noise_sigma_rel", &RunConfig::noise_sigma_rel);

    bool_at("forming.enabled", [](RunConfig& c) -> bool& { return c.forming_enabled; });
    num_at("forming.w_temp", [](RunConfig& c) -> double& { return c.forming_weights.temp; });
    num_at("forming.w_velocity", [](RunConfig& c) -> double& { return c.forming_weights.velocity; });
    num_at("forming.w_stack", [](RunConfig& c) -> double& { return c.forming_weights.stack; });
    num_at("forming.w_temp_gap", [](RunConfig& c) -> double& { return c.forming_weights.temp_gap; });

    num_at("geom.punch_outer_area", [](RunConfig& c) -> double& { return c.geometry.punch_outer_area; });
    num_at("geom.sheet_length", [](RunConfig& c) -> double& { return c.geometry.sheet_length; });
    num_at("geom.sheet_width", [](RunConfig& c) -> double& { return c.geometry.sheet_width; });

    num_at("material.density", [](RunConfig& c) -> double& { return c.material.density; });
    num_at("material.e1", [](RunConfig& c) -> double& { return c.material.e1; });
    num_at("material.e2", [](RunConfig& c) -> double& { return c.material.e2; });
    num_at("material.g12", [](RunConfig& c) -> double& { return c.material.g12; });
    num_at("material.nu12", [](RunConfig& c) -> double& { return c.material.nu12; });
    num_at("material.yield_stress", [](RunConfig& c) -> double& { return c.material.yield_stress; });
    num_at("material.hardening_multiplier", [](RunConfig& c) -> double& { return c.material.hardening_multiplier; });
    num_at("material.hardening_exponent", [](RunConfig& c) -> double& { return c.material.hardening_exponent; });
    num_at("material.tensile_ultimate_strain", [](RunConfig& c) -> double& { return c.material.tensile_ultimate_strain; });
    num_at("material.ultimate_damage", [](RunConfig& c) -> double& { return c.material.ultimate_damage; });

    num_at("rom.characteristic_length", [](RunConfig& c) -> double& { return c.solver.characteristic_length; });
    num_at("rom.width_factor", [](RunConfig& c) -> double& { return c.solver.width_factor; });
    num_at("rom.payload_mass", [](RunConfig& c) -> double& { return c.solver.payload_mass; });
    num_at("rom.damping_ratio", [](RunConfig& c) -> double& { return c.solver.damping_ratio; });
    num_at("rom.cfl_fraction", [](RunConfig& c) -> double& { return c.solver.cfl_fraction; });
    num_at("rom.impact_velocity", [](RunConfig& c) -> double& { return c.solver.impact_velocity; });
    num_at("rom.duration", [](RunConfig& c) -> double& { return c.solver.duration; });
    num_at("rom.dt_out", [](RunConfig& c) -> double& { return c.solver.dt_out; });
    num_at("rom.damage_ramp_strain_ratio", [](RunConfig& c) -> double& { return c.solver.damage_ramp_strain_ratio; });
    num_at("rom.friction_coefficient", [](RunConfig& c) -> double& { return c.solver.friction_coefficient; });

    bool_at("sim.save_traces", [](RunConfig& c) -> bool& { return c.save_traces; });
    t["report.trace_sample"] =
        Key{[](RunConfig& c, const std::string& v) {
              c.report_trace_sample =
                  static_cast<long long>(parse_num("report.trace_sample", v));
            },
            [](const RunConfig& c) {
              return std::to_string(c.report_trace_sample);
            }};

    num_at("ml.test_fraction", [](RunConfig& c) -> double& { return c.ml.test_fraction; });
    int_at("ml.cv_folds", [](RunConfig& c) -> int& { return c.ml.cv_folds; });
    int_at("ml.min_samples_leaf", [](RunConfig& c) -> int& { return c.ml.min_samples_leaf; });
    list_at("ml.gbt.depths", [](RunConfig& c) -> std::vector<double>& { return c.ml.gbt_depths; });
    list_at("ml.gbt.learning_rates", [](RunConfig& c) -> std::vector<double>& { return c.ml.gbt_learning_rates; });
    list_at("ml.gbt.rounds", [](RunConfig& c) -> std::vector<double>& { return c.ml.gbt_rounds; });
    list_at("ml.xgb.lambdas", [](RunConfig& c) -> std::vector<double>& { return c.ml.xgb_lambdas; });
    list_at("ml.rf.trees", [](RunConfig& c) -> std::vector<double>& { return c.ml.rf_trees; });
    list_at("ml.rf.depths", [](RunConfig& c) -> std::vector<double>& { return c.ml.rf_depths; });
    int_at("ml.rf.features_per_split", [](RunConfig& c) -> int& { return c.ml.rf_features_per_split; });

    size_at("symreg.population", [](RunConfig& c) -> std::size_t& { return c.symreg_cfg.population; });
    size_at("symreg.generations", [](RunConfig& c) -> std::size_t& { return c.symreg_cfg.generations; });
    size_at("symreg.tournament", [](RunConfig& c) -> std::size_t& { return c.symreg_cfg.tournament; });
    num_at("symreg.crossover_rate", [](RunConfig& c) -> double& { return c.symreg_cfg.crossover_rate; });
    num_at("symreg.mutation_rate", [](RunConfig& c) -> double& { return c.symreg_cfg.mutation_rate; });
    size_at("symreg.max_complexity", [](RunConfig& c) -> std::size_t& { return c.symreg_cfg.max_complexity; });
    num_at("symreg.parsimony", [](RunConfig& c) -> double& { return c.symreg_cfg.parsimony; });
    num_at("symreg.time_budget_s", [](RunConfig& c) -> double& { return c.symreg_cfg.time_budget_s; });
    num_at("symreg.holdout_fraction", [](RunConfig& c) -> double& { return c.symreg_cfg.holdout_fraction; });
    size_at("symreg.constant_fit_passes", [](RunConfig& c) -> std::size_t& { return c.symreg_cfg.constant_fit_passes; });
    size_at("symreg.polish_top", [](RunConfig& c) -> std::size_t& { return c.symreg_cfg.polish_top; });

    return t;
  }();
  return table;
}

}  // namespace

std::string RunConfig::canonical() const {
  std::ostringstream ss;
  for (const auto& [name, key] : key_table()) {
    // where a run lives and how many workers it uses do not change what
    // it computes, so they stay outside the hash
    if (name == "out" || name == "workers") continue;
    ss << name << " = " << key.get(*this) << "\n";
  }
  return ss.str();
}

std::string RunConfig::config_hash() const { return to_hex(fnv1a64(canonical())); }

void RunConfig::validate() const {
  if (n_samples < 1) throw ConfigError("doe.n_samples must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (noise_sigma_rel < 0.0) {
    throw ConfigError("data.noise_sigma_rel must be >= 0");
  }
  if (!(ml.test_fraction > 0.0 && ml.test_fraction < 1.0)) {
    throw ConfigError("ml.test_fraction must lie in (0,1)");
  }
  if (ml.cv_folds < 2) throw ConfigError("ml.cv_folds must be >= 2");
  try {
    space.validate();
    material.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_config_text(const std::string& text, const RunConfig& base) {
  RunConfig cfg = base;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    auto it = key_table().find(key);
    if (it == key_table().end()) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" +
                        key + "'");
    }
    it->second.set(cfg, value);
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_config_file(const std::string& path, const RunConfig& base) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_config_text(text, base);
}

}  // namespace crashforge::pipeline
