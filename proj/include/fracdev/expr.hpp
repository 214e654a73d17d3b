#pragma once

#include <Eigen/Core>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fracdev::sym {

enum class Op {
  Const,
  Var,
  Neg,
  Sin,
  Cos,
  Exp,
  Log,
  Tanh,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
};

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(std::size_t at, const std::string& what)
      : std::runtime_error(what + " at offset " + std::to_string(at)), offset(at) {}
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Immutable expression over real literals, variables x1..xn, the unary
/// functions {neg, sin, cos, exp, ln, tanh} and the binary operators
/// {+, -, *, /, ^}. Construction folds constants and absorbs 0/1 so that
/// symbolic derivatives stay small.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr constant(double value);
  static Expr variable(int index);  // 1-based, prints as x<index>

  Op op() const;
  double value() const;      // Op::Const only
  int var_index() const;     // Op::Var only
  Expr child(int which) const;  // 0 = only/left child, 1 = right child
  int arity() const;

  bool is_constant() const { return op() == Op::Const; }
  bool is_zero() const;
  bool is_one() const;

  /// Largest variable index used (0 when none).
  int max_variable() const;

  double eval(const Eigen::VectorXd& point) const;  // throws EvalError on domain errors

  std::string str() const;

  /// Structural equality.
  bool same_as(const Expr& other) const;

  struct Node;
  const Node* raw() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend Expr make_unary(Op op, const Expr& a);
  friend Expr make_binary(Op op, const Expr& a, const Expr& b);
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr tanh(const Expr& a);

/// Infix grammar with standard precedence; `^` binds tightest and associates
/// to the right; variables are x1..xn. Throws ParseError with a byte offset.
Expr parse(std::string_view text);

/// Symbolic partial derivative with respect to x<var> (1-based), lightly
/// simplified.
Expr differentiate(const Expr& e, int var);

/// Heuristic used only for a CLI warning: true when every variable occurrence
/// is wrapped in a bounded primitive (sin, cos, tanh).
bool bounded_heuristic(const Expr& e);

}  // namespace fracdev::sym
