#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace crashforge::symreg {

// Expression nodes over the four design features a, b, c, d:
// binary {+, -, *, /}, unary {negate, square}, terminals {variable,
// constant}. Complexity is the node count.
enum class Op : int {
  Add = 0,
  Sub,
  Mul,
  Div,
  Neg,
  Square,
  Var,
  Const,
};

inline bool is_binary(Op op) { return op <= Op::Div; }
inline bool is_unary(Op op) { return op == Op::Neg || op == Op::Square; }

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  Op op = Op::Const;
  double value = 0.0;  // Const payload
  int var = 0;         // Var payload, index into feature vector
  ExprPtr left;
  ExprPtr right;

  Expr() = default;
  Expr(Op o, ExprPtr l, ExprPtr r)
      : op(o), left(std::move(l)), right(std::move(r)) {}

  static ExprPtr constant(double v);
  static ExprPtr variable(int index);
  static ExprPtr unary(Op op, ExprPtr child);
  static ExprPtr binary(Op op, ExprPtr l, ExprPtr r);

  ExprPtr clone() const;
  std::size_t complexity() const;  // node count

  // Throws InvalidExpression if arity or payload is malformed.
  void validate(int n_features) const;
};

// Recursive evaluation. Division by zero (and any non-finite intermediate)
// yields a quiet NaN marker: the row scores as unfit, nothing throws on
// finite inputs. A malformed tree raises InvalidExpression.
double eval_expr(const Expr& e, std::span<const double> features);

// Parenthesized infix with the given feature names; constants are printed
// with 9 significant digits so serialized fronts are byte-stable.
std::string to_infix(const Expr& e, std::span<const std::string> names);

// Default symreg feature names (a, b, c, d).
std::span<const std::string> abcd_names();

}  // namespace crashforge::symreg
