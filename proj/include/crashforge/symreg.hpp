#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crashforge/dataset.hpp"
#include "crashforge/expr.hpp"

namespace crashforge::symreg {

struct SymregConfig {
  std::size_t population = 600;
  std::size_t generations = 60;
  // Independent restarts per call; every restart reseeds the stream and
  // feeds the same front archive.
  std::size_t restarts = 12;
  std::size_t tournament = 5;
  double crossover_rate = 0.9;
  double mutation_rate = 0.25;
  std::size_t max_complexity = 25;
  // Complexity pressure added to the fitness (holdout MAE units per node).
  // <= 0 selects 1e-3 * stddev(y) at evolve time.
  double parsimony = 0.0;
  std::uint64_t seed = 0;
  // Safety cap in seconds, checked between generations. The run is
  // deterministic whenever the cap does not trigger; 1e9 means unlimited.
  double time_budget_s = 1e9;
  double holdout_fraction = 0.2;
  std::size_t constant_fit_passes = 30;
  std::size_t polish_top = 12;  // individuals constant-fitted per generation
};

struct FrontEntry {
  ExprPtr expr;
  std::string expression;  // infix over a, b, c, d
  std::size_t complexity = 0;
  double mae = 0.0;  // holdout
  double r2 = 0.0;   // holdout
};

// Non-dominated (complexity, holdout MAE) set: complexity strictly
// increasing, MAE strictly decreasing.
struct ParetoFront {
  std::vector<FrontEntry> entries;
  bool truncated_by_time = false;

  // CSV: complexity,mae,r2,expression
  std::string to_csv() const;
};

// Greedy coordinate descent over the expression's constants with a shrinking
// multiplicative perturbation schedule, minimizing MAE on (X, y). Never
// worsens the fit; `passes` = 0 returns the expression unchanged.
ExprPtr fit_constants(const Expr& e, const ml::Matrix& X,
                      const std::vector<double>& y, std::size_t passes = 30);

// Tournament GP with subtree crossover/mutation, elitism, and parsimony
// pressure. Data is split 80/20 (seeded); selection fitness is holdout
// MAE + parsimony * complexity; the front collects every evaluated
// individual. Deterministic for a fixed config when the time budget does
// not trigger. Throws InvalidArgument for n < 10 or a zero budget.
ParetoFront evolve(const ml::Matrix& X, const std::vector<double>& y,
                   const SymregConfig& cfg);

}  // namespace crashforge::symreg
