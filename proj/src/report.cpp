#include "crashforge/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "crashforge/dataset.hpp"
#include "crashforge/errors.hpp"
#include "crashforge/pipeline.hpp"
#include "crashforge/svg.hpp"
#include "crashforge/textio.hpp"

namespace crashforge::pipeline {

namespace fs = std::filesystem;

namespace {

void require_artifact(const fs::path& p) {
  if (!fs::exists(p) || fs::file_size(p) == 0) {
    throw MissingArtifact("report needs artifact: " + p.string());
  }
}

struct Parity {
  std::vector<double> y_true;
  std::vector<double> y_pred;
};

std::map<std::string, Parity> read_predictions(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);  // header
  std::map<std::string, Parity> out;
  std::size_t rowno = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 4) {
      throw ParseError("predictions row " + std::to_string(rowno) +
                       ": expected 4 fields");
    }
    Parity& p = out[trim(f[1])];
    p.y_true.push_back(parse_double_field(f[2], rowno, "y_true"));
    p.y_pred.push_back(parse_double_field(f[3], rowno, "y_pred"));
    ++rowno;
  }
  return out;
}

std::map<std::string, std::map<std::string, double>> read_importance(
    const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::map<std::string, std::map<std::string, double>> out;
  std::size_t rowno = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 3) {
      throw ParseError("importance row " + std::to_string(rowno) +
                       ": expected 3 fields");
    }
    out[trim(f[0])][trim(f[1])] =
        parse_double_field(f[2], rowno, "importance");
    ++rowno;
  }
  return out;
}

double r_squared(const Parity& p) {
  double mean = 0.0;
  for (double v : p.y_true) mean += v;
  mean /= static_cast<double>(p.y_true.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < p.y_true.size(); ++i) {
    ss_res += (p.y_true[i] - p.y_pred[i]) * (p.y_true[i] - p.y_pred[i]);
    ss_tot += (p.y_true[i] - mean) * (p.y_true[i] - mean);
  }
  if (ss_tot <= 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

struct TraceColumns {
  std::vector<double> t, force, ke, ie, diss;
};

TraceColumns read_trace(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  TraceColumns tc;
  std::size_t rowno = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 7) {
      throw ParseError("trace row " + std::to_string(rowno) +
                       ": expected 7 fields");
    }
    tc.t.push_back(parse_double_field(f[0], rowno, "t_s"));
    tc.force.push_back(parse_double_field(f[1], rowno, "force_N"));
    tc.ke.push_back(parse_double_field(f[4], rowno, "ke_J"));
    tc.ie.push_back(parse_double_field(f[5], rowno, "ie_J"));
    tc.diss.push_back(parse_double_field(f[6], rowno, "diss_J"));
    ++rowno;
  }
  return tc;
}

}  // namespace

std::vector<fs::path> emit_report(const RunConfig& cfg) {
  RunArtifacts art = RunArtifacts::layout(cfg.out_dir);
  require_artifact(art.dataset_csv);
  require_artifact(art.eval_report);
  require_artifact(art.predictions_csv);
  require_artifact(art.importance_csv);
  for (const auto& [target, path] : art.pareto_csvs) require_artifact(path);
  fs::path model_dir = art.out_dir / "models";
  for (const std::string& target : ml::target_names()) {
    for (const char* family : {"gbt", "xgb", "rf"}) {
      require_artifact(model_dir / (std::string(family) + "_" + target +
                                    ".json"));
    }
  }

  std::vector<fs::path> outputs;

  // parity scatter per target
  auto parity = read_predictions(art.predictions_csv);
  for (const auto& [target, p] : parity) {
    char note[64];
    std::snprintf(note, sizeof(note), "R^2 = %.3f", r_squared(p));
    svg::Series s;
    s.x = p.y_true;
    s.y = p.y_pred;
    fs::path out = art.out_dir / ("parity_" + target + ".svg");
    write_file(out.string(),
               svg::parity_plot("predicted vs true: " + target, s, note));
    outputs.push_back(out);
  }

  // feature importance per target
  auto importance = read_importance(art.importance_csv);
  for (const auto& [target, imp] : importance) {
    std::vector<std::string> labels;
    std::vector<double> values;
    for (const std::string& fname : ml::default_feature_names()) {
      labels.push_back(fname);
      auto it = imp.find(fname);
      values.push_back(it == imp.end() ? 0.0 : it->second);
    }
    fs::path out = art.out_dir / ("importance_" + target + ".svg");
    write_file(out.string(),
               svg::bar_chart("feature importance: " + target, labels, values));
    outputs.push_back(out);
  }

  // symbolic-regression fronts
  for (const auto& [target, path] : art.pareto_csvs) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    svg::Series s;
    s.label = target;
    std::size_t rowno = 0;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto f = split_csv(line);
      if (f.size() < 3) {
        throw ParseError("pareto row " + std::to_string(rowno) +
                         ": expected >= 3 fields");
      }
      s.x.push_back(parse_double_field(f[0], rowno, "complexity"));
      s.y.push_back(parse_double_field(f[1], rowno, "mae"));
      ++rowno;
    }
    fs::path out = art.out_dir / ("pareto_" + target + ".svg");
    write_file(out.string(),
               svg::front_plot("accuracy/complexity front: " + target, s));
    outputs.push_back(out);
  }

  // force/energy history of the configured sample, when a trace exists
  // (oracle runs produce no traces and simply skip this plot)
  fs::path trace = art.out_dir / "traces" /
                   ("trace_" + std::to_string(cfg.report_trace_sample) +
                    ".csv");
  if (fs::exists(trace)) {
    TraceColumns tc = read_trace(trace);
    svg::Series force{"contact force [N]", tc.t, tc.force};
    fs::path fout = art.out_dir / "trace_force.svg";
    write_file(fout.string(),
               svg::line_plot("contact force, sample " +
                                  std::to_string(cfg.report_trace_sample),
                              "time [s]", {force}));
    outputs.push_back(fout);

    std::vector<double> total(tc.t.size());
    for (std::size_t i = 0; i < tc.t.size(); ++i) {
      total[i] = tc.ke[i] + tc.ie[i] + tc.diss[i];
    }
    std::vector<svg::Series> energies = {
        {"kinetic [J]", tc.t, tc.ke},
        {"internal [J]", tc.t, tc.ie},
        {"dissipated [J]", tc.t, tc.diss},
        {"total [J]", tc.t, total},
    };
    fs::path eout = art.out_dir / "trace_energy.svg";
    write_file(eout.string(),
               svg::line_plot("energy balance, sample " +
                                  std::to_string(cfg.report_trace_sample),
                              "time [s]", energies));
    outputs.push_back(eout);
  }

  return outputs;
}

}  // namespace crashforge::pipeline
