#include "crashforge/expr.hpp"

#include <cmath>
#include <limits>

#include "crashforge/errors.hpp"
#include "crashforge/textio.hpp"

namespace crashforge::symreg {

ExprPtr Expr::constant(double v) {
  auto e = std::make_unique<Expr>();
  e->op = Op::Const;
  e->value = v;
  return e;
}

ExprPtr Expr::variable(int index) {
  auto e = std::make_unique<Expr>();
  e->op = Op::Var;
  e->var = index;
  return e;
}

ExprPtr Expr::unary(Op op, ExprPtr child) {
  auto e = std::make_unique<Expr>();
  e->op = op;
  e->left = std::move(child);
  return e;
}

ExprPtr Expr::binary(Op op, ExprPtr l, ExprPtr r) {
  auto e = std::make_unique<Expr>();
  e->op = op;
  e->left = std::move(l);
  e->right = std::move(r);
  return e;
}

ExprPtr Expr::clone() const {
  auto e = std::make_unique<Expr>();
  e->op = op;
  e->value = value;
  e->var = var;
  if (left) e->left = left->clone();
  if (right) e->right = right->clone();
  return e;
}

std::size_t Expr::complexity() const {
  std::size_t n = 1;
  if (left) n += left->complexity();
  if (right) n += right->complexity();
  return n;
}

void Expr::validate(int n_features) const {
  if (is_binary(op)) {
    if (!left || !right) {
      throw InvalidExpression("binary node missing a child");
    }
    left->validate(n_features);
    right->validate(n_features);
    return;
  }
  if (is_unary(op)) {
    if (!left || right) {
      throw InvalidExpression("unary node needs exactly one child");
    }
    left->validate(n_features);
    return;
  }
  if (left || right) {
    throw InvalidExpression("terminal node carries children");
  }
  if (op == Op::Var && (var < 0 || var >= n_features)) {
    throw InvalidExpression("variable index out of range");
  }
  if (op == Op::Const && !std::isfinite(value)) {
    throw InvalidExpression("non-finite constant");
  }
}

double eval_expr(const Expr& e, std::span<const double> features) {
  switch (e.op) {
    case Op::Const:
      return e.value;
    case Op::Var:
      if (e.var < 0 || static_cast<std::size_t>(e.var) >= features.size()) {
        throw InvalidExpression("variable index out of range");
      }
      return features[e.var];
    case Op::Neg:
      if (!e.left) throw InvalidExpression("negate node missing child");
      return -eval_expr(*e.left, features);
    case Op::Square: {
      if (!e.left) throw InvalidExpression("square node missing child");
      double v = eval_expr(*e.left, features);
      return v * v;
    }
    default:
      break;
  }
  if (!e.left || !e.right) throw InvalidExpression("binary node missing child");
  double l = eval_expr(*e.left, features);
  double r = eval_expr(*e.right, features);
  switch (e.op) {
    case Op::Add:
      return l + r;
    case Op::Sub:
      return l - r;
    case Op::Mul:
      return l * r;
    case Op::Div:
      if (r == 0.0) return std::numeric_limits<double>::quiet_NaN();
      return l / r;
    default:
      throw InvalidExpression("unknown operator");
  }
}

namespace {

void infix(const Expr& e, std::span<const std::string> names,
           std::string& out) {
  switch (e.op) {
    case Op::Const:
      out += fmt_g9(e.value);
      return;
    case Op::Var:
      out += names[e.var];
      return;
    case Op::Neg:
      out += "(-";
      infix(*e.left, names, out);
      out += ')';
      return;
    case Op::Square:
      out += "(";
      infix(*e.left, names, out);
      out += ")^2";
      return;
    default:
      break;
  }
  const char* sym = e.op == Op::Add   ? " + "
                    : e.op == Op::Sub ? " - "
                    : e.op == Op::Mul ? " * "
                                      : " / ";
  out += '(';
  infix(*e.left, names, out);
  out += sym;
  infix(*e.right, names, out);
  out += ')';
}

}  // namespace

std::string to_infix(const Expr& e, std::span<const std::string> names) {
  std::string out;
  infix(e, names, out);
  return out;
}

std::span<const std::string> abcd_names() {
  static const std::vector<std::string> kNames = {"a", "b", "c", "d"};
  return kNames;
}

}  // namespace crashforge::symreg
