#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracdev/elementary.hpp"
#include "fracdev/rng.hpp"
#include "fracdev/sde_spec.hpp"

using namespace fracdev;
using sym::Expr;

namespace {

Eigen::VectorXd pt(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<long>(values.size()));
  int i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

SdeSpec simple_spec(const std::string& b, const std::string& sigma, const std::string& f, double a0) {
  SdeSpec s;
  s.n = s.d = 1;
  s.hurst = 0.75;
  s.horizon = 1.0;
  s.initial = pt({a0});
  s.drift = {sym::parse(b)};
  s.diffusion = {{sym::parse(sigma)}};
  s.f = sym::parse(f);
  s.validate();
  return s;
}

}  // namespace

TEST_CASE("parsing basics") {
  CHECK(sym::parse("x1").str() == "x1");
  const Expr e = sym::parse("sin(x1)*x2 + 2");
  CHECK(e.op() == sym::Op::Add);
  CHECK(e.child(0).op() == sym::Op::Mul);
  CHECK(e.child(0).child(0).op() == sym::Op::Sin);
  CHECK(e.child(1).value() == 2.0);

  CHECK(sym::parse("2^3^2").eval(pt({})) == 512.0);      // right associative
  CHECK(sym::parse("2*3+4").eval(pt({})) == 10.0);
  CHECK(sym::parse("-x1^2").eval(pt({3.0})) == -9.0);
  CHECK(sym::parse("1e-2 + 1").eval(pt({})) == doctest::Approx(1.01));
}

TEST_CASE("parse errors carry byte offsets") {
  try {
    sym::parse("x1^(");
    FAIL("expected ParseError");
  } catch (const sym::ParseError& err) {
    CHECK(err.offset == 4);
  }
  CHECK_THROWS_AS(sym::parse("foo(x1)"), sym::ParseError);
  CHECK_THROWS_AS(sym::parse("sin(x1, x2)"), sym::ParseError);
  CHECK_THROWS_AS(sym::parse("x0"), sym::ParseError);
  CHECK_THROWS_AS(sym::parse("1 + "), sym::ParseError);
}

TEST_CASE("print/parse round trip is structural identity") {
  SplitMix64 rng(7);
  const std::vector<std::string> samples = {
      "x1", "sin(x1)*x2 + 2", "exp(2*x1)", "x1^2/(1 + x2^2)", "-(x1 - x2)*tanh(x1)", "ln(1 + x1^2) - cos(x2)^3",
      "x1*x2*x3 - 4.5e-1*x1^(2 + 1)"};
  for (const auto& s : samples) {
    const Expr e = sym::parse(s);
    CHECK(sym::parse(e.str()).same_as(e));
  }
}

TEST_CASE("differentiation goldens") {
  const Expr e = sym::parse("x1^2");
  CHECK(sym::differentiate(e, 1).str() == "2*x1");
  CHECK(sym::differentiate(sym::parse("x1"), 2).is_zero());
  const Expr d = sym::differentiate(sym::parse("exp(2*x1)"), 1);
  CHECK(d.eval(pt({0.0})) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("differentiation agrees with central finite differences") {
  const std::vector<std::string> library = {
      "sin(x1)*x2 + 2", "exp(0.5*x1) - x2^3", "tanh(x1*x2)", "x1/(1 + x2^2)", "ln(2 + sin(x1))", "cos(x1)^2*x2",
      "x1^3 - 2*x1*x2 + 0.5"};
  SplitMix64 rng(42);
  for (const auto& text : library) {
    const Expr e = sym::parse(text);
    for (int var = 1; var <= 2; ++var) {
      const Expr de = sym::differentiate(e, var);
      for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd x = pt({2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0});
        const double h = 1e-6;
        Eigen::VectorXd xp = x, xm = x;
        xp[var - 1] += h;
        xm[var - 1] -= h;
        const double fd = (e.eval(xp) - e.eval(xm)) / (2.0 * h);
        const double sym_val = de.eval(x);
        CHECK(sym_val == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("evaluation domain errors") {
  CHECK_THROWS_AS(sym::parse("ln(x1)").eval(pt({-1.0})), sym::EvalError);
  CHECK_THROWS_AS(sym::parse("x1/x2").eval(pt({1.0, 0.0})), sym::EvalError);
  CHECK_THROWS_AS(sym::parse("x1^0.5").eval(pt({-2.0})), sym::EvalError);
}

TEST_CASE("operator apply_D") {
  // n = d = 1, b = x1, sigma = 1, f = x1
  const SdeSpec s = simple_spec("x1", "1", "x1", 1.0);
  CHECK(sym::apply_D(s, s.f, 0).str() == "x1");
  CHECK(sym::apply_D(s, s.f, 1).eval(pt({3.0})) == 1.0);

  const SdeSpec s2 = simple_spec("0", "x1", "x1", 1.0);
  const Expr e = sym::parse("x1^2");
  CHECK(sym::apply_D(s2, e, 1).eval(pt({1.0})) == doctest::Approx(2.0));
}

TEST_CASE("apply_D_alpha basics") {
  const SdeSpec quartic = simple_spec("0", "1", "x1^4", 0.0);
  const Expr out = sym::apply_D_alpha(quartic, quartic.f, MultiIndex{{1, 1, 1, 1}});
  CHECK(out.eval(pt({0.123})) == doctest::Approx(24.0));

  const SdeSpec linear = simple_spec("x1", "1", "x1", 1.0);
  const Expr comp = sym::apply_D_alpha(linear, linear.f, MultiIndex{{0, 0}});
  CHECK(comp.eval(pt({1.0})) == doctest::Approx(1.0));
  CHECK(sym::apply_D_alpha(linear, linear.f, MultiIndex{{}}).same_as(linear.f));
}

TEST_CASE("elementary differentials of the published examples") {
  // F(gamma) = f(a)
  const SdeSpec s = simple_spec("x1", "1", "x1^2", 0.0);
  const auto gamma = trees::parse_bracket("γ^1");
  CHECK(expansion::elementary_differential(s, gamma, {}, pt({2.0})) == doctest::Approx(4.0));

  // t_I = ([tau_{j2}^4]^2, tau_{j1}^3)^1 -> f''(b'(sigma^{j2}), sigma^{j1}); n=d=1,
  // f = x^2, b = x, sigma = 1, a = 0 gives 2.
  const auto ti = trees::parse_bracket("([τ_{j2}^4]^2, τ_{j1}^3)^1");
  CHECK(expansion::elementary_differential(s, ti, {1, 1}, pt({0.0})) == doctest::Approx(2.0));

  // t_II = ({tau_0^4, tau_{j2}^3}_{j1}^2)^1 -> f'(sigma''(b, sigma)); affine sigma -> 0.
  const auto tii = trees::parse_bracket("({τ_0^4, τ_{j2}^3}_{j1}^2)^1");
  SdeSpec affine = simple_spec("x1", "2*x1 + 1", "x1^2", 0.5);
  CHECK(expansion::elementary_differential(affine, tii, {1, 1}, pt({0.5})) == 0.0);
}

TEST_CASE("symmetry of the multilinear forms") {
  // permuting children of the root leaves F unchanged
  SdeSpec s;
  s.n = 2;
  s.d = 2;
  s.hurst = 0.75;
  s.horizon = 1.0;
  s.initial = pt({0.3, -0.2});
  s.drift = {sym::parse("sin(x2)"), sym::parse("x1*x2")};
  s.diffusion = {{sym::parse("cos(x1)"), sym::parse("x2")}, {sym::parse("x1 + x2"), sym::parse("exp(0.3*x1)")}};
  s.f = sym::parse("sin(x1)*x2 + x1^2");
  s.validate();
  const auto ta = trees::parse_bracket("(τ_0^2, τ_{j1}^3)^1");
  const auto tb = trees::parse_bracket("(τ_0^3, τ_{j1}^2)^1");
  for (int j = 1; j <= 2; ++j) {
    const double va = expansion::elementary_differential(s, ta, {j}, s.initial);
    const double vb = expansion::elementary_differential(s, tb, {j}, s.initial);
    CHECK(va == doctest::Approx(vb).epsilon(1e-14));
  }
}

TEST_CASE("derivative-operator identity: sum of F over a word class equals D^alpha f") {
  SdeSpec s;
  s.n = 2;
  s.d = 2;
  s.hurst = 0.75;
  s.horizon = 1.0;
  s.initial = pt({0.4, -0.3});
  s.drift = {sym::parse("0.5*sin(x2)"), sym::parse("0.2*x1 + 0.1*x2^2")};
  s.diffusion = {{sym::parse("0.3*cos(x1)"), sym::parse("0.25*x2 + 0.5")},
                 {sym::parse("0.2*x1*x2"), sym::parse("0.4*exp(0.2*x1)")}};
  s.f = sym::parse("x1^2*x2 + sin(x1) + 0.5*x2");
  s.validate();

  for (int m = 1; m <= 3; ++m) {
    // bucket the elementary differentials by label word
    std::map<std::string, double> buckets;
    trees::for_each_tree(m + 1, [&](const trees::LabelledTree& t) {
      if (t.node_count() != m + 1) return;
      for (const auto& a : trees::all_assignments(t.stochastic_count(), s.d)) {
        buckets[trees::label_word(t, a).str()] +=
            expansion::elementary_differential(s, t, a, s.initial);
      }
    });
    // enumerate all words of length m over {0,1,2}
    std::vector<int> word(m, 0);
    for (;;) {
      const MultiIndex alpha{word};
      const double direct = sym::apply_D_alpha(s, s.f, alpha).eval(s.initial);
      CHECK(buckets[alpha.str()] == doctest::Approx(direct).epsilon(1e-10));
      int i = m - 1;
      for (; i >= 0; --i) {
        if (word[i] < s.d) {
          ++word[i];
          for (int k = i + 1; k < m; ++k) word[k] = 0;
          break;
        }
      }
      if (i < 0) break;
    }
  }
}

TEST_CASE("bounded heuristic") {
  CHECK(sym::bounded_heuristic(sym::parse("sin(x1)*cos(x2) + 2")));
  CHECK_FALSE(sym::bounded_heuristic(sym::parse("x1")));
  CHECK_FALSE(sym::bounded_heuristic(sym::parse("exp(x1)")));
  CHECK(sym::bounded_heuristic(sym::parse("exp(sin(x1))")));
}

TEST_CASE("spec validation") {
  SdeSpec s = simple_spec("x1", "1", "x1", 0.0);
  s.hurst = 0.2;
  CHECK_THROWS(s.validate());
  s.hurst = 0.75;
  s.f = sym::parse("x2");
  CHECK_THROWS(s.validate());
}
