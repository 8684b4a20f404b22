#include <doctest.h>

#include <cmath>

#include "crashforge/errors.hpp"
#include "crashforge/expr.hpp"
#include "crashforge/rng.hpp"
#include "crashforge/symreg.hpp"

using namespace crashforge;
using symreg::Expr;
using symreg::ExprPtr;
using symreg::Op;

namespace {

ml::Matrix column_matrix(const std::vector<std::vector<double>>& rows) {
  ml::Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m.at(r, c) = rows[r][c];
  }
  return m;
}

// -0.692ab + 0.390a + 1.819b + 17.116 as an explicit tree
ExprPtr intrusion_tree() {
  ExprPtr ab = Expr::binary(Op::Mul, Expr::variable(0), Expr::variable(1));
  ExprPtr t1 = Expr::binary(Op::Mul, Expr::constant(-0.692), std::move(ab));
  ExprPtr t2 = Expr::binary(Op::Mul, Expr::constant(0.390), Expr::variable(0));
  ExprPtr t3 = Expr::binary(Op::Mul, Expr::constant(1.819), Expr::variable(1));
  ExprPtr sum = Expr::binary(Op::Add, std::move(t1), std::move(t2));
  sum = Expr::binary(Op::Add, std::move(sum), std::move(t3));
  return Expr::binary(Op::Add, std::move(sum), Expr::constant(17.116));
}

}  // namespace

TEST_CASE("expression evaluation") {
  SUBCASE("constants evaluate to themselves") {
    ExprPtr c = Expr::constant(5.0);
    std::vector<double> x = {1, 2, 3, 4};
    CHECK(symreg::eval_expr(*c, x) == doctest::Approx(5.0));
  }
  SUBCASE("hand-built intrusion law at a=8, b=0.25") {
    ExprPtr e = intrusion_tree();
    std::vector<double> x = {8.0, 0.25, 300.0, 120.0};
    CHECK(symreg::eval_expr(*e, x) ==
          doctest::Approx(19.30675).epsilon(1e-12));
  }
  SUBCASE("division by zero is a quiet penalty marker") {
    // x / (c - c)
    ExprPtr den =
        Expr::binary(Op::Sub, Expr::variable(2), Expr::variable(2));
    ExprPtr e = Expr::binary(Op::Div, Expr::variable(0), std::move(den));
    std::vector<double> x = {8.0, 0.25, 300.0, 120.0};
    CHECK(std::isnan(symreg::eval_expr(*e, x)));
  }
  SUBCASE("square and negate") {
    ExprPtr e = Expr::unary(Op::Square, Expr::variable(1));
    std::vector<double> x = {0.0, -3.0};
    CHECK(symreg::eval_expr(*e, x) == doctest::Approx(9.0));
    ExprPtr n = Expr::unary(Op::Neg, Expr::constant(2.5));
    CHECK(symreg::eval_expr(*n, x) == doctest::Approx(-2.5));
  }
  SUBCASE("malformed trees are invalid expressions") {
    Expr broken;
    broken.op = Op::Add;  // binary without children
    std::vector<double> x = {1.0};
    CHECK_THROWS_AS(symreg::eval_expr(broken, x), InvalidExpression);
    CHECK_THROWS_AS(broken.validate(4), InvalidExpression);
  }
  SUBCASE("evaluation never throws on finite inputs") {
    Rng rng(99);
    // random expressions over random finite inputs: finite or NaN, no throw
    symreg::SymregConfig cfg;
    cfg.population = 2;
    cfg.generations = 1;
    for (int k = 0; k < 200; ++k) {
      // build a random tree through the public pieces
      ExprPtr e = Expr::binary(static_cast<Op>(rng.below(4)),
                               rng.uniform01() < 0.5
                                   ? Expr::variable(static_cast<int>(rng.below(4)))
                                   : Expr::constant(rng.uniform(-100, 100)),
                               rng.uniform01() < 0.5
                                   ? Expr::variable(static_cast<int>(rng.below(4)))
                                   : Expr::constant(rng.uniform(-1, 1)));
      if (rng.uniform01() < 0.3) e = Expr::unary(Op::Square, std::move(e));
      std::vector<double> x = {rng.uniform(-50, 50), rng.uniform(-50, 50),
                               rng.uniform(-50, 50), rng.uniform(-50, 50)};
      double v = 0.0;
      CHECK_NOTHROW(v = symreg::eval_expr(*e, x));
      CHECK((std::isfinite(v) || std::isnan(v) || std::isinf(v)));
    }
  }
}

TEST_CASE("infix serialization uses the a..d names") {
  ExprPtr e = Expr::binary(Op::Mul, Expr::constant(2.0), Expr::variable(3));
  CHECK(symreg::to_infix(*e, symreg::abcd_names()) == "(2 * d)");
  ExprPtr sq = Expr::unary(Op::Square, Expr::variable(0));
  CHECK(symreg::to_infix(*sq, symreg::abcd_names()) == "(a)^2");
}

TEST_CASE("complexity is the node count") {
  CHECK(intrusion_tree()->complexity() == 15);
  CHECK(Expr::constant(1.0)->complexity() == 1);
}

TEST_CASE("fit_constants") {
  SUBCASE("single constant against a constant target") {
    ExprPtr e = Expr::constant(1.0);
    ml::Matrix X = column_matrix({{0.0}, {1.0}, {2.0}});
    std::vector<double> y = {7.25, 7.25, 7.25};
    ExprPtr fit = symreg::fit_constants(*e, X, y, 40);
    CHECK(fit->value == doctest::Approx(7.25).epsilon(1e-6));
  }
  SUBCASE("slope recovery on exact linear data") {
    // k * a with y = 136.585 * a
    ExprPtr e = Expr::binary(Op::Mul, Expr::constant(2.4), Expr::variable(0));
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    for (int a = 4; a <= 16; a += 2) {
      rows.push_back({static_cast<double>(a)});
      y.push_back(136.585 * a);
    }
    ml::Matrix X = column_matrix(rows);
    ExprPtr fit = symreg::fit_constants(*e, X, y, 40);
    CHECK(fit->left->value == doctest::Approx(136.585).epsilon(1e-5));
    CHECK(std::abs(fit->left->value - 136.585) < 1e-3);
  }
  SUBCASE("zero passes returns the expression unchanged") {
    ExprPtr e = Expr::constant(3.0);
    ml::Matrix X = column_matrix({{1.0}, {2.0}});
    std::vector<double> y = {5.0, 5.0};
    ExprPtr fit = symreg::fit_constants(*e, X, y, 0);
    CHECK(fit->value == doctest::Approx(3.0));
  }
  SUBCASE("never worsens the fit") {
    ExprPtr e = Expr::binary(Op::Add, Expr::constant(17.0),
                             Expr::binary(Op::Mul, Expr::constant(0.4),
                                          Expr::variable(0)));
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    Rng rng(4);
    for (int i = 0; i < 30; ++i) {
      double a = rng.uniform(4, 16);
      rows.push_back({a});
      y.push_back(0.39 * a + 17.1 + 0.05 * rng.normal());
    }
    ml::Matrix X = column_matrix(rows);
    auto mae = [&](const Expr& expr) {
      double s = 0.0;
      for (std::size_t r = 0; r < X.rows; ++r) {
        s += std::abs(symreg::eval_expr(expr, X.row(r)) - y[r]);
      }
      return s / static_cast<double>(X.rows);
    };
    double before = mae(*e);
    ExprPtr fit = symreg::fit_constants(*e, X, y, 25);
    CHECK(mae(*fit) <= before + 1e-12);
  }
}

TEST_CASE("evolve input validation") {
  ml::Matrix X = column_matrix({{1, 1, 1, 1}, {2, 2, 2, 2}});
  std::vector<double> y = {1, 2};
  symreg::SymregConfig cfg;
  CHECK_THROWS_AS(symreg::evolve(X, y, cfg), InvalidArgument);  // n < 10

  ml::Matrix X10(12, 4);
  std::vector<double> y10(12, 1.0);
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t c = 0; c < 4; ++c) X10.at(i, c) = static_cast<double>(i + c);
    y10[i] = static_cast<double>(i);
  }
  cfg.generations = 0;
  CHECK_THROWS_AS(symreg::evolve(X10, y10, cfg), InvalidArgument);
  cfg.generations = 5;
  cfg.time_budget_s = 0.0;
  CHECK_THROWS_AS(symreg::evolve(X10, y10, cfg), InvalidArgument);
  cfg.time_budget_s = 1e9;
  cfg.population = 1;
  CHECK_THROWS_AS(symreg::evolve(X10, y10, cfg), InvalidArgument);
}

TEST_CASE("identity target is recovered by a tiny run") {
  Rng rng(6);
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  for (int i = 0; i < 24; ++i) {
    double a = rng.uniform(4, 16), b = rng.uniform(0.1, 0.6);
    double c = rng.uniform(200, 400), d = rng.uniform(20, 220);
    rows.push_back({a, b, c, d});
    y.push_back(b);
  }
  ml::Matrix X = column_matrix(rows);
  symreg::SymregConfig cfg;
  cfg.population = 40;
  cfg.generations = 6;
  cfg.restarts = 2;
  cfg.polish_top = 4;
  cfg.seed = 3;
  symreg::ParetoFront front = symreg::evolve(X, y, cfg);
  REQUIRE(!front.entries.empty());
  CHECK(front.entries[0].complexity == 1);
  CHECK(front.entries[0].mae == doctest::Approx(0.0));
  CHECK(front.entries[0].expression == "b");
}

TEST_CASE("front laws: dominance, reproducibility, elitism") {
  Rng rng(8);
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  for (int i = 0; i < 40; ++i) {
    double a = rng.uniform(4, 16), b = rng.uniform(0.1, 0.6);
    double c = rng.uniform(200, 400), d = rng.uniform(20, 220);
    rows.push_back({a, b, c, d});
    y.push_back(-0.692 * a * b + 0.390 * a + 1.819 * b + 17.116);
  }
  ml::Matrix X = column_matrix(rows);

  symreg::SymregConfig cfg;
  cfg.population = 80;
  cfg.generations = 8;
  cfg.restarts = 2;
  cfg.polish_top = 6;
  cfg.seed = 21;

  symreg::ParetoFront front = symreg::evolve(X, y, cfg);
  REQUIRE(front.entries.size() >= 1);

  SUBCASE("strictly increasing complexity, strictly decreasing MAE") {
    for (std::size_t i = 1; i < front.entries.size(); ++i) {
      CHECK(front.entries[i].complexity > front.entries[i - 1].complexity);
      CHECK(front.entries[i].mae < front.entries[i - 1].mae);
    }
  }
  SUBCASE("identical config gives a byte-identical front") {
    symreg::ParetoFront again = symreg::evolve(X, y, cfg);
    CHECK(again.to_csv() == front.to_csv());
  }
  SUBCASE("longer runs never lose the best (elitism + archive)") {
    symreg::SymregConfig one = cfg;
    one.restarts = 1;
    one.generations = 4;
    symreg::ParetoFront shorter = symreg::evolve(X, y, one);
    one.generations = 8;
    symreg::ParetoFront longer = symreg::evolve(X, y, one);
    double best_short = shorter.entries.back().mae;
    double best_long = longer.entries.back().mae;
    CHECK(best_long <= best_short + 1e-12);
  }
}
