#include "crashforge/symreg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "crashforge/errors.hpp"
#include "crashforge/rng.hpp"
#include "crashforge/textio.hpp"

namespace crashforge::symreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// MAE over the rows; any non-finite prediction makes the expression unfit
// (infinite error) rather than throwing.
double expr_mae(const Expr& e, const ml::Matrix& X, const std::vector<double>& y) {
  double sum = 0.0;
  for (std::size_t r = 0; r < X.rows; ++r) {
    double v = eval_expr(e, X.row(r));
    if (!std::isfinite(v)) return kInf;
    sum += std::abs(v - y[r]);
  }
  return sum / static_cast<double>(X.rows);
}

void collect_nodes(Expr& e, std::vector<Expr*>& out) {
  out.push_back(&e);
  if (e.left) collect_nodes(*e.left, out);
  if (e.right) collect_nodes(*e.right, out);
}

void collect_nodes_const(const Expr& e, std::vector<const Expr*>& out) {
  out.push_back(&e);
  if (e.left) collect_nodes_const(*e.left, out);
  if (e.right) collect_nodes_const(*e.right, out);
}

void collect_constants(Expr& e, std::vector<Expr*>& out) {
  if (e.op == Op::Const) out.push_back(&e);
  if (e.left) collect_constants(*e.left, out);
  if (e.right) collect_constants(*e.right, out);
}

}  // namespace

ExprPtr fit_constants(const Expr& e, const ml::Matrix& X,
                      const std::vector<double>& y, std::size_t passes) {
  if (X.rows == 0 || y.size() != X.rows) {
    throw InvalidArgument("fit_constants: empty data or size mismatch");
  }
  ExprPtr refined = e.clone();
  std::vector<Expr*> consts;
  collect_constants(*refined, consts);
  if (consts.empty() || passes == 0) return refined;

  double best = expr_mae(*refined, X, y);
  double step = 1.0;
  for (std::size_t pass = 0; pass < passes; ++pass) {
    for (Expr* c : consts) {
      for (int rep = 0; rep < 8; ++rep) {
        double original = c->value;
        double base = original == 0.0 ? 1e-3 : original;
        // multiplicative probes around the current value, plus a sign flip
        // and decade jumps so far-off seeds can still travel
        const double candidates[] = {base * (1.0 + step), base / (1.0 + step),
                                     base * (1.0 + 5.0 * step),
                                     base / (1.0 + 5.0 * step),
                                     -original,
                                     base * 10.0,
                                     base / 10.0};
        double chosen = original;
        for (double cand : candidates) {
          if (!std::isfinite(cand)) continue;
          c->value = cand;
          double mae = expr_mae(*refined, X, y);
          if (mae < best) {
            best = mae;
            chosen = cand;
          }
        }
        c->value = chosen;
        if (chosen == original) break;  // no probe helped; shrink the step
      }
    }
    step *= 0.5;
  }
  return refined;
}

namespace {

struct Individual {
  ExprPtr expr;
  double mae = kInf;      // holdout MAE
  double fitness = kInf;  // mae + parsimony * complexity
  std::size_t complexity = 0;
};

class Evolver {
 public:
  Evolver(const ml::Matrix& X, const std::vector<double>& y,
          const SymregConfig& cfg)
      : cfg_(cfg), rng_(cfg.seed) {
    n_features_ = static_cast<int>(X.cols);
    split(X, y);
    parsimony_ = cfg.parsimony;
    if (parsimony_ <= 0.0) {
      parsimony_ = 1e-3 * stddev(y_hold_);
      if (parsimony_ <= 0.0) parsimony_ = 1e-6;
    }
  }

  ParetoFront run() {
    auto t_start = std::chrono::steady_clock::now();
    ParetoFront front;

    auto out_of_time = [&] {
      double elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t_start)
                           .count();
      return elapsed > cfg_.time_budget_s;
    };

    for (std::size_t restart = 0; restart < cfg_.restarts; ++restart) {
      if (restart > 0 && out_of_time()) {
        front.truncated_by_time = true;
        break;
      }
      rng_ = Rng(substream_seed(cfg_.seed, restart));
      init_population();
      for (std::size_t gen = 0; gen < cfg_.generations; ++gen) {
        if (gen > 0) {
          if (out_of_time()) {
            front.truncated_by_time = true;
            break;
          }
          next_generation();
        }
        polish_best();
      }
      if (front.truncated_by_time) break;
    }

    // final polish of the archived front candidates
    std::vector<ExprPtr> candidates;
    candidates.reserve(archive_.size());
    for (auto& [cx, entry] : archive_) candidates.push_back(entry.expr->clone());
    for (ExprPtr& c : candidates) {
      offer(fit_constants(*c, X_train_, y_train_, cfg_.constant_fit_passes));
    }
    build_front(front);
    return front;
  }

 private:
  struct ArchiveEntry {
    ExprPtr expr;
    double mae = kInf;
  };

  static double stddev(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return std::sqrt(var / static_cast<double>(v.size()));
  }

  void split(const ml::Matrix& X, const std::vector<double>& y) {
    std::size_t n = X.rows;
    std::size_t n_train = static_cast<std::size_t>(std::floor(
        static_cast<double>(n) * (1.0 - cfg_.holdout_fraction) + 1e-9));
    if (n_train == 0) n_train = 1;
    if (n_train == n) n_train = n - 1;
    Rng split_rng(cfg_.seed ^ 0x5eed5eedULL);
    std::vector<std::size_t> perm = split_rng.permutation(n);
    std::vector<std::size_t> tr(perm.begin(), perm.begin() + n_train);
    std::vector<std::size_t> ho(perm.begin() + n_train, perm.end());
    X_train_ = X.select_rows(tr);
    X_hold_ = X.select_rows(ho);
    y_train_.resize(tr.size());
    y_hold_.resize(ho.size());
    for (std::size_t i = 0; i < tr.size(); ++i) y_train_[i] = y[tr[i]];
    for (std::size_t i = 0; i < ho.size(); ++i) y_hold_[i] = y[ho[i]];
  }

  ExprPtr random_terminal() {
    if (rng_.uniform01() < 0.7) {
      return Expr::variable(static_cast<int>(rng_.below(n_features_)));
    }
    return Expr::constant(rng_.uniform(-10.0, 10.0));
  }

  Op random_binary_op() {
    // division underweighted: protected-division penalties make div-heavy
    // trees mostly dead weight
    double roll = rng_.uniform01();
    if (roll < 0.30) return Op::Add;
    if (roll < 0.55) return Op::Sub;
    if (roll < 0.85) return Op::Mul;
    return Op::Div;
  }

  ExprPtr random_tree(int depth, bool full) {
    if (depth <= 0 || (!full && rng_.uniform01() < 0.3)) {
      return random_terminal();
    }
    // a modest bias toward binary structure keeps trees expressive
    double roll = rng_.uniform01();
    if (roll < 0.8) {
      return Expr::binary(random_binary_op(), random_tree(depth - 1, full),
                          random_tree(depth - 1, full));
    }
    Op op = rng_.uniform01() < 0.5 ? Op::Neg : Op::Square;
    return Expr::unary(op, random_tree(depth - 1, full));
  }

  void evaluate(Individual& ind) {
    ind.complexity = ind.expr->complexity();
    ind.mae = expr_mae(*ind.expr, X_hold_, y_hold_);
    ind.fitness = ind.mae + parsimony_ * static_cast<double>(ind.complexity);
    archive_offer(*ind.expr, ind.complexity, ind.mae);
  }

  void archive_offer(const Expr& e, std::size_t complexity, double mae) {
    if (!std::isfinite(mae)) return;
    auto it = archive_.find(complexity);
    if (it == archive_.end() || mae < it->second.mae) {
      archive_[complexity] = ArchiveEntry{e.clone(), mae};
    }
  }

  void offer(ExprPtr e) {
    Individual ind;
    ind.expr = std::move(e);
    evaluate(ind);
  }

  void init_population() {
    pop_.clear();
    pop_.reserve(cfg_.population);
    int depth = 2;
    bool full = false;
    for (std::size_t i = 0; i < cfg_.population; ++i) {
      Individual ind;
      ind.expr = random_tree(depth, full);
      evaluate(ind);
      pop_.push_back(std::move(ind));
      full = !full;
      if (full) depth = 2 + static_cast<int>(i % 3);  // ramp 2..4
    }
  }

  std::size_t tournament() {
    std::size_t best = rng_.below(pop_.size());
    for (std::size_t i = 1; i < cfg_.tournament; ++i) {
      std::size_t probe = rng_.below(pop_.size());
      if (pop_[probe].fitness < pop_[best].fitness) best = probe;
    }
    return best;
  }

  void jitter_constant(Expr& e) {
    std::vector<Expr*> consts;
    collect_constants(e, consts);
    if (consts.empty()) return;
    Expr* c = consts[rng_.below(consts.size())];
    c->value *= 1.0 + 0.3 * rng_.normal();
    if (!std::isfinite(c->value)) c->value = 1.0;
  }

  void mutate(Expr& e) {
    double roll = rng_.uniform01();
    if (roll < 0.35) {
      // subtree replacement at a random node
      std::vector<Expr*> nodes;
      collect_nodes(e, nodes);
      Expr* target = nodes[rng_.below(nodes.size())];
      ExprPtr sub = random_tree(2, false);
      *target = std::move(*sub);
      return;
    }
    if (roll < 0.6) {
      jitter_constant(e);
      return;
    }
    if (roll < 0.8) {
      // hoist: promote a random subtree, trimming bloat
      std::vector<Expr*> nodes;
      collect_nodes(e, nodes);
      Expr* target = nodes[rng_.below(nodes.size())];
      std::vector<Expr*> inner;
      collect_nodes(*target, inner);
      ExprPtr lifted = inner[rng_.below(inner.size())]->clone();
      *target = std::move(*lifted);
      return;
    }
    // point mutation: swap an operator or variable in place
    std::vector<Expr*> nodes;
    collect_nodes(e, nodes);
    Expr* target = nodes[rng_.below(nodes.size())];
    if (is_binary(target->op)) {
      target->op = random_binary_op();
    } else if (is_unary(target->op)) {
      target->op = target->op == Op::Neg ? Op::Square : Op::Neg;
    } else if (target->op == Op::Var) {
      target->var = static_cast<int>(rng_.below(n_features_));
    } else {
      jitter_constant(*target);
    }
  }

  ExprPtr crossover(const Expr& a, const Expr& b) {
    ExprPtr child = a.clone();
    std::vector<Expr*> nodes;
    collect_nodes(*child, nodes);
    Expr* target = nodes[rng_.below(nodes.size())];

    std::vector<const Expr*> donors;
    collect_nodes_const(b, donors);
    ExprPtr graft = donors[rng_.below(donors.size())]->clone();
    *target = std::move(*graft);
    return child;
  }

  void next_generation() {
    std::vector<Individual> next;
    next.reserve(cfg_.population);

    // elites: best by fitness and best by raw holdout MAE
    std::size_t best_fit = 0, best_mae = 0;
    for (std::size_t i = 1; i < pop_.size(); ++i) {
      if (pop_[i].fitness < pop_[best_fit].fitness) best_fit = i;
      if (pop_[i].mae < pop_[best_mae].mae) best_mae = i;
    }
    for (std::size_t elite : {best_fit, best_mae}) {
      if (next.size() >= cfg_.population) break;
      Individual ind;
      ind.expr = pop_[elite].expr->clone();
      evaluate(ind);
      next.push_back(std::move(ind));
    }

    // a slice of fresh random trees each generation keeps the search from
    // collapsing onto one basin
    std::size_t immigrants = cfg_.population / 10;

    while (next.size() < cfg_.population) {
      ExprPtr child;
      if (cfg_.population - next.size() <= immigrants) {
        child = random_tree(2 + static_cast<int>(rng_.below(3)), false);
      } else if (rng_.uniform01() < cfg_.crossover_rate) {
        const Individual& pa = pop_[tournament()];
        const Individual& pb = pop_[tournament()];
        child = crossover(*pa.expr, *pb.expr);
        if (rng_.uniform01() < cfg_.mutation_rate) mutate(*child);
      } else {
        child = pop_[tournament()].expr->clone();
        mutate(*child);
      }
      if (child->complexity() > cfg_.max_complexity) {
        child = pop_[tournament()].expr->clone();
      }
      Individual ind;
      ind.expr = std::move(child);
      evaluate(ind);
      next.push_back(std::move(ind));
    }
    pop_ = std::move(next);
  }

  // Constant-fit a diverse slice of the population on the training split:
  // the best individual at each complexity (small shapes first), then the
  // overall best. Fitting the small shapes early lets a structurally right
  // but badly parameterized candidate surface before bloat crowds it out.
  void polish_best() {
    std::map<std::size_t, std::size_t> best_at;  // complexity -> index
    for (std::size_t i = 0; i < pop_.size(); ++i) {
      auto it = best_at.find(pop_[i].complexity);
      if (it == best_at.end() ||
          pop_[i].fitness < pop_[it->second].fitness) {
        best_at[pop_[i].complexity] = i;
      }
    }
    std::vector<std::size_t> picks;
    for (const auto& [cx, idx] : best_at) picks.push_back(idx);  // small first
    if (picks.size() > cfg_.polish_top) picks.resize(cfg_.polish_top);
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop_.size(); ++i) {
      if (pop_[i].fitness < pop_[best].fitness) best = i;
    }
    if (std::find(picks.begin(), picks.end(), best) == picks.end()) {
      picks.push_back(best);
    }

    for (std::size_t idx : picks) {
      Individual& ind = pop_[idx];
      ExprPtr refined = fit_constants(*ind.expr, X_train_, y_train_,
                                      cfg_.constant_fit_passes);
      Individual polished;
      polished.expr = std::move(refined);
      evaluate(polished);
      if (polished.fitness < ind.fitness) ind = std::move(polished);
    }
  }

  double holdout_r2(const Expr& e) const {
    double mean = 0.0;
    for (double v : y_hold_) mean += v;
    mean /= static_cast<double>(y_hold_.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t r = 0; r < X_hold_.rows; ++r) {
      double p = eval_expr(e, X_hold_.row(r));
      if (!std::isfinite(p)) return -kInf;
      ss_res += (y_hold_[r] - p) * (y_hold_[r] - p);
      ss_tot += (y_hold_[r] - mean) * (y_hold_[r] - mean);
    }
    if (ss_tot <= 0.0) return 0.0;
    return 1.0 - ss_res / ss_tot;
  }

  void build_front(ParetoFront& front) {
    // archive_ is ordered by complexity; keep strictly improving MAE
    double best = kInf;
    for (auto& [cx, entry] : archive_) {
      if (entry.mae < best) {
        best = entry.mae;
        FrontEntry fe;
        fe.expr = entry.expr->clone();
        fe.expression = to_infix(*entry.expr, abcd_names());
        fe.complexity = cx;
        fe.mae = entry.mae;
        fe.r2 = holdout_r2(*entry.expr);
        front.entries.push_back(std::move(fe));
      }
    }
  }

  SymregConfig cfg_;
  Rng rng_;
  int n_features_ = 0;
  double parsimony_ = 0.0;
  ml::Matrix X_train_, X_hold_;
  std::vector<double> y_train_, y_hold_;
  std::vector<Individual> pop_;
  std::map<std::size_t, ArchiveEntry> archive_;
};

}  // namespace

std::string ParetoFront::to_csv() const {
  std::ostringstream ss;
  ss << "complexity,mae,r2,expression\n";
  for (const FrontEntry& e : entries) {
    ss << e.complexity << ',' << fmt_g9(e.mae) << ',' << fmt_g9(e.r2) << ','
       << e.expression << "\n";
  }
  return ss.str();
}

ParetoFront evolve(const ml::Matrix& X, const std::vector<double>& y,
                   const SymregConfig& cfg) {
  if (X.rows < 10 || y.size() != X.rows) {
    throw InvalidArgument("evolve: need at least 10 rows");
  }
  if (X.cols == 0) throw InvalidArgument("evolve: no features");
  if (cfg.population < 2) {
    throw InvalidArgument("evolve: population must be >= 2");
  }
  if (cfg.generations == 0 || cfg.time_budget_s <= 0.0 || cfg.restarts == 0) {
    throw InvalidArgument("evolve: zero budget would yield an empty front");
  }
  if (cfg.tournament < 1) throw InvalidArgument("evolve: tournament size < 1");
  if (cfg.crossover_rate < 0.0 || cfg.crossover_rate > 1.0 ||
      cfg.mutation_rate < 0.0 || cfg.mutation_rate > 1.0) {
    throw InvalidArgument("evolve: rates must lie in [0,1]");
  }
  if (!(cfg.holdout_fraction > 0.0 && cfg.holdout_fraction < 1.0)) {
    throw InvalidArgument("evolve: holdout fraction must lie in (0,1)");
  }
  Evolver ev(X, y, cfg);
  return ev.run();
}

}  // namespace crashforge::symreg
