#include "fracdev/expr.hpp"

#include <cctype>
#include <cmath>

namespace fracdev::sym {

struct Expr::Node {
  Op op;
  double value = 0.0;
  int var = 0;
  std::shared_ptr<const Node> a, b;
};

namespace {

std::shared_ptr<const Expr::Node> make_node(Op op, double value, int var, std::shared_ptr<const Expr::Node> a,
                                            std::shared_ptr<const Expr::Node> b) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->value = value;
  n->var = var;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

const std::shared_ptr<const Expr::Node>& zero_node() {
  static const auto n = make_node(Op::Const, 0.0, 0, nullptr, nullptr);
  return n;
}

double apply_unary(Op op, double x) {
  switch (op) {
    case Op::Neg: return -x;
    case Op::Sin: return std::sin(x);
    case Op::Cos: return std::cos(x);
    case Op::Exp: return std::exp(x);
    case Op::Tanh: return std::tanh(x);
    case Op::Log:
      if (!(x > 0.0)) throw EvalError("ln of a non-positive value (" + std::to_string(x) + ")");
      return std::log(x);
    default: throw std::logic_error("apply_unary: not unary");
  }
}

double checked_pow(double base, double expo) {
  if (base == 0.0 && expo < 0.0) throw EvalError("0 raised to a negative power");
  if (base < 0.0 && expo != std::floor(expo)) throw EvalError("negative base with non-integer exponent");
  return std::pow(base, expo);
}

}  // namespace

Expr::Expr() : node_(zero_node()) {}

Expr Expr::constant(double value) { return Expr(value == 0.0 ? zero_node() : make_node(Op::Const, value, 0, nullptr, nullptr)); }

Expr Expr::variable(int index) {
  if (index < 1) throw std::invalid_argument("Expr::variable: indices are 1-based");
  return Expr(make_node(Op::Var, 0.0, index, nullptr, nullptr));
}

Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
int Expr::var_index() const { return node_->var; }

Expr Expr::child(int which) const {
  const auto& n = which == 0 ? node_->a : node_->b;
  if (!n) throw std::out_of_range("Expr::child");
  return Expr(n);
}

int Expr::arity() const {
  if (node_->b) return 2;
  if (node_->a) return 1;
  return 0;
}

bool Expr::is_zero() const { return node_->op == Op::Const && node_->value == 0.0; }
bool Expr::is_one() const { return node_->op == Op::Const && node_->value == 1.0; }

int Expr::max_variable() const {
  switch (op()) {
    case Op::Const: return 0;
    case Op::Var: return node_->var;
    default: {
      int m = Expr(node_->a).max_variable();
      if (node_->b) m = std::max(m, Expr(node_->b).max_variable());
      return m;
    }
  }
}

double Expr::eval(const Eigen::VectorXd& point) const {
  switch (op()) {
    case Op::Const: return node_->value;
    case Op::Var:
      if (node_->var > point.size()) throw EvalError("variable x" + std::to_string(node_->var) + " outside the state dimension");
      return point[node_->var - 1];
    case Op::Add: return Expr(node_->a).eval(point) + Expr(node_->b).eval(point);
    case Op::Sub: return Expr(node_->a).eval(point) - Expr(node_->b).eval(point);
    case Op::Mul: {
      const double lhs = Expr(node_->a).eval(point);
      if (lhs == 0.0) return 0.0;
      return lhs * Expr(node_->b).eval(point);
    }
    case Op::Div: {
      const double den = Expr(node_->b).eval(point);
      if (den == 0.0) throw EvalError("division by zero");
      return Expr(node_->a).eval(point) / den;
    }
    case Op::Pow: return checked_pow(Expr(node_->a).eval(point), Expr(node_->b).eval(point));
    default: return apply_unary(op(), Expr(node_->a).eval(point));
  }
}

bool Expr::same_as(const Expr& other) const {
  if (node_ == other.node_) return true;
  if (op() != other.op()) return false;
  switch (op()) {
    case Op::Const: return node_->value == other.node_->value;
    case Op::Var: return node_->var == other.node_->var;
    default:
      if (static_cast<bool>(node_->b) != static_cast<bool>(other.node_->b)) return false;
      if (!Expr(node_->a).same_as(Expr(other.node_->a))) return false;
      return !node_->b || Expr(node_->b).same_as(Expr(other.node_->b));
  }
}

Expr make_unary(Op op, const Expr& a) {
  if (a.is_constant() && op != Op::Log) return Expr::constant(apply_unary(op, a.value()));
  if (a.is_constant() && op == Op::Log && a.value() > 0.0) return Expr::constant(std::log(a.value()));
  if (op == Op::Neg && a.op() == Op::Neg) return a.child(0);
  return Expr(make_node(op, 0.0, 0, a.raw() ? std::shared_ptr<const Expr::Node>(a.node_) : nullptr, nullptr));
}

Expr make_binary(Op op, const Expr& a, const Expr& b) {
  switch (op) {
    case Op::Add:
      if (a.is_zero()) return b;
      if (b.is_zero()) return a;
      if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() + b.value());
      break;
    case Op::Sub:
      if (b.is_zero()) return a;
      if (a.is_zero()) return make_unary(Op::Neg, b);
      if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() - b.value());
      break;
    case Op::Mul:
      if (a.is_zero() || b.is_zero()) return Expr();
      if (a.is_one()) return b;
      if (b.is_one()) return a;
      if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() * b.value());
      break;
    case Op::Div:
      if (a.is_zero()) return Expr();
      if (b.is_one()) return a;
      if (a.is_constant() && b.is_constant() && b.value() != 0.0) return Expr::constant(a.value() / b.value());
      break;
    case Op::Pow:
      if (b.is_zero()) return Expr::constant(1.0);
      if (b.is_one()) return a;
      if (a.is_constant() && b.is_constant()) return Expr::constant(checked_pow(a.value(), b.value()));
      break;
    default: throw std::logic_error("make_binary: not binary");
  }
  return Expr(make_node(op, 0.0, 0, a.node_, b.node_));
}

Expr operator+(const Expr& a, const Expr& b) { return make_binary(Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return make_binary(Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return make_binary(Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return make_binary(Op::Div, a, b); }
Expr operator-(const Expr& a) { return make_unary(Op::Neg, a); }
Expr pow(const Expr& a, const Expr& b) { return make_binary(Op::Pow, a, b); }
Expr sin(const Expr& a) { return make_unary(Op::Sin, a); }
Expr cos(const Expr& a) { return make_unary(Op::Cos, a); }
Expr exp(const Expr& a) { return make_unary(Op::Exp, a); }
Expr log(const Expr& a) { return make_unary(Op::Log, a); }
Expr tanh(const Expr& a) { return make_unary(Op::Tanh, a); }

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

std::string number_str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print(const Expr& e, int parent_prec, bool right_side, std::string& out) {
  const Op op = e.op();
  const int prec = precedence(op);
  switch (op) {
    case Op::Const: {
      if (e.value() < 0.0) {
        out += "(" + number_str(e.value()) + ")";
      } else {
        out += number_str(e.value());
      }
      return;
    }
    case Op::Var: out += "x" + std::to_string(e.var_index()); return;
    case Op::Sin: case Op::Cos: case Op::Exp: case Op::Log: case Op::Tanh: {
      const char* name = op == Op::Sin ? "sin" : op == Op::Cos ? "cos" : op == Op::Exp ? "exp" : op == Op::Log ? "ln" : "tanh";
      out += name;
      out += "(";
      print(e.child(0), 0, false, out);
      out += ")";
      return;
    }
    case Op::Neg: {
      const bool parens = prec < parent_prec || (parent_prec == prec && right_side) || parent_prec == precedence(Op::Pow);
      if (parens) out += "(";
      out += "-";
      print(e.child(0), prec, true, out);
      if (parens) out += ")";
      return;
    }
    default: {
      const bool parens = prec < parent_prec || (prec == parent_prec && right_side && op != Op::Pow);
      if (parens) out += "(";
      const char* sym = op == Op::Add ? " + " : op == Op::Sub ? " - " : op == Op::Mul ? "*" : op == Op::Div ? "/" : "^";
      // '^' is right-associative: the left child needs parens at equal precedence.
      print(e.child(0), op == Op::Pow ? prec + 1 : prec, false, out);
      out += sym;
      print(e.child(1), prec, op != Op::Pow, out);
      if (parens) out += ")";
      return;
    }
  }
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print(*this, 0, false, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos, what); }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  Expr expression(int min_prec) {
    Expr lhs = atom();
    for (;;) {
      skip_ws();
      if (pos >= text.size()) return lhs;
      const char c = text[pos];
      Op op;
      int prec;
      switch (c) {
        case '+': op = Op::Add; prec = 1; break;
        case '-': op = Op::Sub; prec = 1; break;
        case '*': op = Op::Mul; prec = 2; break;
        case '/': op = Op::Div; prec = 2; break;
        case '^': op = Op::Pow; prec = 4; break;
        default: return lhs;
      }
      if (prec < min_prec) return lhs;
      ++pos;
      // '^' right-associative, the rest left-associative.
      Expr rhs = expression(op == Op::Pow ? prec : prec + 1);
      lhs = make_binary(op, lhs, rhs);
    }
  }

  Expr atom() {
    skip_ws();
    if (pos >= text.size()) fail("expected an expression");
    const char c = text[pos];
    if (c == '(') {
      ++pos;
      Expr inner = expression(1);
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (c == '-') {
      ++pos;
      return -expression(3);
    }
    if (c == '+') {
      ++pos;
      return expression(3);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr number() {
    const std::size_t start = pos;
    while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) ++pos;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      } else {
        pos = mark;  // not an exponent after all
      }
    }
    try {
      return Expr::constant(std::stod(std::string(text.substr(start, pos - start))));
    } catch (const std::exception&) {
      pos = start;
      fail("malformed number");
    }
  }

  Expr identifier() {
    const std::size_t start = pos;
    while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) ++pos;
    const std::string name(text.substr(start, pos - start));
    if (name.size() > 1 && name[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
      if (digits) {
        const int index = std::stoi(name.substr(1));
        if (index < 1) {
          pos = start;
          fail("variable indices start at x1");
        }
        return Expr::variable(index);
      }
    }
    Op op;
    if (name == "sin") op = Op::Sin;
    else if (name == "cos") op = Op::Cos;
    else if (name == "exp") op = Op::Exp;
    else if (name == "ln" || name == "log") op = Op::Log;
    else if (name == "tanh") op = Op::Tanh;
    else if (name == "pi") return Expr::constant(3.14159265358979323846264338328);
    else {
      pos = start;
      fail("unknown identifier '" + name + "'");
    }
    if (!eat('(')) fail("expected '(' after function name");
    Expr arg = expression(1);
    skip_ws();
    if (eat(',')) fail("functions take a single argument");
    if (!eat(')')) fail("expected ')'");
    return make_unary(op, arg);
  }
};

}  // namespace

Expr parse(std::string_view text) {
  Parser p{text};
  Expr e = p.expression(1);
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

// ---------------------------------------------------------------------------
// Differentiation

Expr differentiate(const Expr& e, int var) {
  if (var < 1) throw std::invalid_argument("differentiate: indices are 1-based");
  switch (e.op()) {
    case Op::Const: return Expr();
    case Op::Var: return e.var_index() == var ? Expr::constant(1.0) : Expr();
    case Op::Add: return differentiate(e.child(0), var) + differentiate(e.child(1), var);
    case Op::Sub: return differentiate(e.child(0), var) - differentiate(e.child(1), var);
    case Op::Mul:
      return differentiate(e.child(0), var) * e.child(1) + e.child(0) * differentiate(e.child(1), var);
    case Op::Div: {
      const Expr num = e.child(0), den = e.child(1);
      return differentiate(num, var) / den - num * differentiate(den, var) / (den * den);
    }
    case Op::Pow: {
      const Expr base = e.child(0), expo = e.child(1);
      if (expo.is_constant()) {
        return expo * pow(base, Expr::constant(expo.value() - 1.0)) * differentiate(base, var);
      }
      // d(a^b) = a^b * (b' ln a + b a'/a)
      return e * (differentiate(expo, var) * log(base) + expo * differentiate(base, var) / base);
    }
    case Op::Neg: return -differentiate(e.child(0), var);
    case Op::Sin: return cos(e.child(0)) * differentiate(e.child(0), var);
    case Op::Cos: return -(sin(e.child(0)) * differentiate(e.child(0), var));
    case Op::Exp: return e * differentiate(e.child(0), var);
    case Op::Log: return differentiate(e.child(0), var) / e.child(0);
    case Op::Tanh: {
      const Expr t = tanh(e.child(0));
      return (Expr::constant(1.0) - t * t) * differentiate(e.child(0), var);
    }
  }
  throw std::logic_error("differentiate: unhandled op");
}

bool bounded_heuristic(const Expr& e) {
  switch (e.op()) {
    case Op::Const: return true;
    case Op::Var: return false;
    case Op::Sin: case Op::Cos: case Op::Tanh: return true;
    case Op::Neg: return bounded_heuristic(e.child(0));
    case Op::Exp: case Op::Log: return bounded_heuristic(e.child(0));
    case Op::Div: return bounded_heuristic(e.child(0)) && e.child(1).is_constant();
    case Op::Add: case Op::Sub: case Op::Mul:
      return bounded_heuristic(e.child(0)) && bounded_heuristic(e.child(1));
    case Op::Pow: return bounded_heuristic(e.child(0)) && e.child(1).is_constant();
  }
  return false;
}

}  // namespace fracdev::sym
