#include "fracdev/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "fracdev/expansion.hpp"
#include "fracdev/iterated_moments.hpp"
#include "fracdev/labelled_tree.hpp"
#include "fracdev/monte_carlo.hpp"
#include "fracdev/parallel.hpp"
#include "fracdev/path_signature.hpp"
#include "fracdev/rng.hpp"
#include "fracdev/rough.hpp"
#include "fracdev/solver.hpp"

namespace fracdev::suite {

using nlohmann::json;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream log;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      log << "FAILED: " << what << "\n";
    }
  }
  void note(const std::string& what) { log << what << "\n"; }
};

SdeSpec make_spec(int n, int d, double hurst, const Eigen::VectorXd& a, const std::vector<std::string>& drift,
                  const std::vector<std::vector<std::string>>& diffusion, const std::string& f, double T = 1.0) {
  SdeSpec s;
  s.n = n;
  s.d = d;
  s.hurst = hurst;
  s.horizon = T;
  s.initial = a;
  for (const auto& e : drift) s.drift.push_back(sym::parse(e));
  for (const auto& row : diffusion) {
    std::vector<sym::Expr> r;
    for (const auto& e : row) r.push_back(sym::parse(e));
    s.diffusion.push_back(std::move(r));
  }
  s.f = sym::parse(f);
  s.validate();
  return s;
}

long scaled(long paths, const SuiteConfig& cfg) { return std::max<long>(64, std::lround(paths * cfg.paths_scale)); }

// ---------------------------------------------------------------------------
// 1. Tree census

CriterionResult c1_trees(const SuiteConfig&) {
  Check ck;
  const auto trees3 = trees::enumerate_lts(3);
  ck.expect(trees3.size() == 11, "enumerate_lts(3) must yield 11 trees, got " + std::to_string(trees3.size()));

  // The published l <= 3 census, translated to this bracket grammar
  // (stochastic node sigma_{j_k} -> tau_{jk}, deterministic tau -> tau_0).
  const std::vector<std::string> published = {
      "γ^1",
      "(τ_{j1}^2)^1",
      "(τ_0^2)^1",
      "(τ_{j1}^2, τ_{j2}^3)^1",
      "({τ_{j2}^3}_{j1}^2)^1",
      "([τ_{j1}^3]^2)^1",
      "({τ_0^3}_{j1}^2)^1",
      "(τ_0^2, τ_{j1}^3)^1",
      "(τ_0^3, τ_{j1}^2)^1",
      "(τ_0^2, τ_0^3)^1",
      "([τ_0^3]^2)^1",
  };
  std::set<std::string> expected;
  for (const auto& b : published) expected.insert(trees::bracket_string(trees::parse_bracket(b)));
  std::set<std::string> got;
  for (const auto& t : trees3) {
    got.insert(trees::bracket_string(t));
    // round trip
    ck.expect(trees::parse_bracket(trees::bracket_string(t)) == t, "bracket round-trip failed for " +
                                                                       trees::bracket_string(t));
  }
  ck.expect(got == expected, "enumerated census does not match the published l <= 3 list");

  // counts per level against an independent brute-force enumeration
  for (int l = 1; l <= 6; ++l) {
    long brute = 0;
    std::vector<int> parents(l - 1, 1);
    for (;;) {
      long labelings = 1;
      for (int i = 0; i < l - 1; ++i) labelings *= 2;
      brute += labelings;
      int i = l - 2;
      for (; i >= 0; --i) {
        if (parents[i] < i + 1) {
          ++parents[i];
          for (int k = i + 1; k < l - 1; ++k) parents[k] = 1;
          break;
        }
      }
      if (i < 0) break;
    }
    long count = 0;
    trees::for_each_tree(l, [&](const trees::LabelledTree& t) {
      if (t.node_count() == l) ++count;
    });
    const auto closed = trees::level_count(l);
    ck.expect(count == brute && static_cast<std::uint64_t>(count) == closed,
              "level " + std::to_string(l) + ": enumerated " + std::to_string(count) + ", brute " +
                  std::to_string(brute) + ", (l-1)!2^(l-1) = " + std::to_string(closed));
  }
  CriterionResult r;
  r.name = "tree-census";
  r.passed = ck.ok;
  r.summary = "11 trees at l<=3 match the published list; level counts match brute force up to l=6";
  r.details["log"] = ck.log.str();
  return r;
}

// ---------------------------------------------------------------------------
// 2. Moment golden values and the pairing-vs-simulation cross-check

CriterionResult c2_moments(const SuiteConfig& cfg) {
  Check ck;
  const double H = 0.75;
  auto expect_close = [&](const MultiIndex& a, double hurst, double want, double tol, const char* what) {
    const auto r = moments::expected_iterated_integral(a, hurst);
    const double value = r.value + cfg.moment_bias;
    ck.expect(std::abs(value - want) <= tol,
              std::string(what) + ": got " + std::to_string(value) + ", want " + std::to_string(want));
  };
  expect_close(MultiIndex{{1, 1}}, H, 0.5, 1e-6, "E I(1,1)");
  expect_close(MultiIndex{{1, 1, 1, 1}}, H, 0.125, 1e-6, "E I(1,1,1,1)");
  expect_close(MultiIndex{{1, 2}}, H, 0.0, 0.0, "E I(1,2)");
  expect_close(MultiIndex{{1, 0, 1}}, H, 0.1, 1e-6, "E I(1,0,1)");
  expect_close(MultiIndex{{0, 0}}, H, 0.5, 0.0, "E I(0,0)");
  for (const auto& odd : {MultiIndex{{1}}, MultiIndex{{1, 1, 1}}, MultiIndex{{0, 1, 0}}, MultiIndex{{2, 1, 2}}}) {
    const auto r = moments::expected_iterated_integral(odd, H);
    ck.expect(r.value == 0.0 && r.error_estimate == 0.0, "odd-weight word " + odd.str() + " must vanish exactly");
  }
  auto expect_second = [&](const MultiIndex& a, double want, const char* what) {
    const auto r = moments::second_moment_iterated_integral(a, H);
    ck.expect(std::abs(r.value - want) <= 1e-6,
              std::string(what) + ": got " + std::to_string(r.value) + ", want " + std::to_string(want));
  };
  expect_second(MultiIndex{{0}}, 1.0, "E I(0)^2");
  expect_second(MultiIndex{{1}}, 1.0, "E I(1)^2");
  expect_second(MultiIndex{{1, 1}}, 0.75, "E I(1,1)^2");
  {
    // force the shuffle/pairing route through the same golden value
    moments::MomentOptions force;
    force.force_pairing = true;
    const auto r = moments::second_moment_iterated_integral(MultiIndex{{1, 1}}, H, force);
    ck.expect(std::abs(r.value - 0.75) <= 1e-6, "pairing-route second moment of (1,1) must be 0.75");
  }

  // Pairing formula == piecewise-linear path simulation, all words of length
  // <= 4 over letters {0,1,2}, three Hurst values, 3 standard errors.
  const int d = 2, maxlen = 4, steps = 512;
  const long paths = scaled(100000, cfg);
  for (const double hurst : {0.6, 0.75, 0.9}) {
    sig::Signature signature(d + 1, maxlen);
    // ranks over all words of length 1..maxlen
    std::size_t total = 0, size = 1;
    for (int l = 1; l <= maxlen; ++l) {
      size *= d + 1;
      total += size;
    }
    std::vector<double> sum(total, 0.0), sum2(total, 0.0);
    fbm::FbmSampler sampler(hurst, Grid(1.0, steps), d);
    std::vector<double> vals(total);
    for (long p = 0; p < paths; ++p) {
      const fbm::FbmPath path = sampler.sample(derive_seed(cfg.seed, 900 + p));
      signature.reset();
      Eigen::VectorXd inc(d + 1);
      for (int k = 0; k < steps; ++k) {
        inc[0] = path.grid.dt();
        inc.tail(d) = path.increment(k);
        signature.append_segment(inc);
      }
      std::size_t idx = 0;
      std::vector<int> word;
      const std::function<void(int)> walk = [&](int remaining) {
        if (!word.empty()) {
          vals[idx++] = signature.word(word);
        }
        if (remaining == 0) return;
        for (int a = 0; a <= d; ++a) {
          word.push_back(a);
          walk(remaining - 1);
          word.pop_back();
        }
      };
      // enumerate words in a fixed depth-first order
      idx = 0;
      walk(maxlen);
      for (std::size_t i = 0; i < total; ++i) {
        sum[i] += vals[i];
        sum2[i] += vals[i] * vals[i];
      }
    }
    // compare against the pairing formula word by word
    std::size_t idx = 0;
    std::vector<int> word;
    int checked = 0;
    const std::function<void(int)> walk = [&](int remaining) {
      if (!word.empty()) {
        const std::size_t i = idx++;
        const double mean = sum[i] / paths;
        const double var = std::max(0.0, sum2[i] / paths - mean * mean);
        const double se = std::sqrt(var / paths);
        const auto r = moments::expected_iterated_integral(MultiIndex{word}, hurst);
        const double value = r.value + cfg.moment_bias;
        const double tol = 3.0 * se + 3.0 * r.error_estimate + 2e-4;  // discretization allowance
        if (std::abs(value - mean) > tol) {
          ck.expect(false, "pairing vs simulation at H=" + std::to_string(hurst) + ", word (" +
                               MultiIndex{word}.str() + "): pairing " + std::to_string(value) + ", mc " +
                               std::to_string(mean) + " +- " + std::to_string(se));
        }
        ++checked;
      }
      if (remaining == 0) return;
      for (int a = 0; a <= d; ++a) {
        word.push_back(a);
        walk(remaining - 1);
        word.pop_back();
      }
    };
    idx = 0;
    walk(maxlen);
    ck.note("H=" + std::to_string(hurst) + ": " + std::to_string(checked) + " words cross-checked with " +
            std::to_string(paths) + " paths");
  }

  CriterionResult r;
  r.name = "moment-goldens";
  r.passed = ck.ok;
  r.summary = "pairing-formula golden values and 3-sigma agreement with path simulation (|alpha|<=4)";
  r.details["log"] = ck.log.str();
  return r;
}

// ---------------------------------------------------------------------------
// 3. m = 2 expansion against the closed-form display

CriterionResult c3_m2_identity(const SuiteConfig& cfg) {
  Check ck;
  const double H = 0.7;
  SdeSpec spec = make_spec(
      2, 2, H, Eigen::Vector2d(0.0, 0.0), {"0.3*x2 + 0.1*sin(x1)", "0.05*x2 - 0.2*x1"},
      {{"0.4 + 0.1*sin(x1)", "0.2 + 0.08*cos(x2)"}, {"0.15*sin(x2)", "0.3 + 0.05*cos(x1)"}},
      "sin(x1) + 0.5*x2^2 + 0.25*x1*x2");

  // first and second partials of an expression at a point
  const auto d1 = [&](const sym::Expr& e, int i, const Eigen::VectorXd& a) { return sym::differentiate(e, i).eval(a); };
  const auto d2 = [&](const sym::Expr& e, int i, int j, const Eigen::VectorXd& a) {
    return sym::differentiate(sym::differentiate(e, i), j).eval(a);
  };

  SplitMix64 rng(cfg.seed ^ 0xabcdULL);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd a(2);
    a << 2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0;
    SdeSpec at = spec;
    at.initial = a;

    // closed-form coefficients of 1, t, t^{2H}, t^2
    double c0 = at.f.eval(a);
    double c1 = 0.0, c2h = 0.0, c2 = 0.0;
    Eigen::Vector2d b(at.drift[0].eval(a), at.drift[1].eval(a));
    Eigen::Matrix2d sig;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) sig(i, j) = at.diffusion[i][j].eval(a);
    for (int i = 1; i <= 2; ++i) c1 += d1(at.f, i, a) * b[i - 1];
    for (int j = 0; j < 2; ++j)
      for (int i1 = 1; i1 <= 2; ++i1)
        for (int i2 = 1; i2 <= 2; ++i2)
          c2h += 0.5 * d2(at.f, i1, i2, a) * sig(i1 - 1, j) * sig(i2 - 1, j);
    for (int j = 0; j < 2; ++j)
      for (int i1 = 1; i1 <= 2; ++i1)
        for (int i2 = 1; i2 <= 2; ++i2)
          c2h += 0.5 * d1(at.f, i1, a) * d1(at.diffusion[i1 - 1][j], i2, a) * sig(i2 - 1, j);
    for (int i1 = 1; i1 <= 2; ++i1)
      for (int i2 = 1; i2 <= 2; ++i2) {
        c2 += 0.5 * d2(at.f, i1, i2, a) * b[i1 - 1] * b[i2 - 1];
        c2 += 0.5 * d1(at.f, i1, a) * d1(at.drift[i1 - 1], i2, a) * b[i2 - 1];
      }

    const expansion::Expansion e = expansion::expand(at, 2);
    std::map<long long, double> got;
    for (const auto& agg : e.aggregates) got[std::llround(agg.exponent * 1e9)] = agg.coefficient;
    const auto coeff = [&](double expo) {
      auto it = got.find(std::llround(expo * 1e9));
      return it == got.end() ? 0.0 : it->second;
    };
    ck.expect(std::abs(coeff(0.0) - c0) <= 1e-10, "t^0 coefficient mismatch");
    ck.expect(std::abs(coeff(1.0) - c1) <= 1e-10, "t^1 coefficient mismatch");
    ck.expect(std::abs(coeff(2.0 * H) - c2h) <= 1e-10, "t^{2H} coefficient mismatch");
    ck.expect(std::abs(coeff(2.0) - c2) <= 1e-10, "t^2 coefficient mismatch");
    ck.expect(e.aggregates.size() <= 4, "m=2 expansion must only carry exponents {0, 1, 2H, 2}");
  }

  CriterionResult r;
  r.name = "m2-closed-form";
  r.passed = ck.ok;
  r.summary = "order-2 engine output equals the closed-form display at 20 random points (1e-10)";
  r.details["log"] = ck.log.str();
  return r;
}

// ---------------------------------------------------------------------------
// 4. Trivial-equation coefficient series

CriterionResult c4_trivial_series(const SuiteConfig&) {
  Check ck;
  const double H = 0.75;
  const int order = 8;
  for (const auto& [fexpr, a0] : std::vector<std::pair<std::string, double>>{
           {"x1^2", 0.3}, {"x1^4", 0.7}, {"exp(x1)", 0.2}}) {
    Eigen::VectorXd a(1);
    a << a0;
    SdeSpec spec = make_spec(1, 1, H, a, {"0"}, {{"1"}}, fexpr);
    expansion::ExpandOptions opt;
    opt.tree_cap = order + 1;
    opt.prune_zero = true;
    const expansion::Expansion e = expansion::expand(spec, order, opt);

    std::map<long long, double> got;
    for (const auto& agg : e.aggregates) got[std::llround(agg.exponent * 1e9)] = agg.coefficient;

    sym::Expr deriv = spec.f;
    for (int k = 0; k <= order; ++k) {
      const double fk = deriv.eval(a);
      double ck_expected = 0.0;
      if (k % 2 == 0) {
        double denom = 1.0;
        for (int i = 1; i <= k / 2; ++i) denom *= 2.0 * i;
        ck_expected = 1.0 / denom;
      }
      const auto it = got.find(std::llround(k * H * 1e9));
      const double got_coeff = it == got.end() ? 0.0 : it->second;
      ck.expect(std::abs(got_coeff - ck_expected * fk) <= 1e-12,
                "f=" + fexpr + ", k=" + std::to_string(k) + ": coefficient " + std::to_string(got_coeff) +
                    " vs c_k f^(k)(a) = " + std::to_string(ck_expected * fk));
      if (k < order) deriv = sym::differentiate(deriv, 1);
    }
  }
  CriterionResult r;
  r.name = "trivial-series";
  r.passed = ck.ok;
  r.summary = "dX = dB expansion coefficients equal c_k f^(k)(a) to 1e-12 for k <= 8";
  r.details["log"] = ck.log.str();
  return r;
}

// ---------------------------------------------------------------------------
// 5. Monte Carlo consistency at H = 0.75

CriterionResult c5_mc_consistency(const SuiteConfig& cfg) {
  Check ck;
  Eigen::VectorXd a(1);
  a << 0.0;
  SdeSpec spec = make_spec(1, 1, 0.75, a, {"0"}, {{"1"}}, "x1^2");
  mc::McConfig mccfg;
  mccfg.paths = scaled(100000, cfg);
  mccfg.steps = 64;
  mccfg.seed = derive_seed(cfg.seed, 5);
  mccfg.threads = cfg.threads;
  mccfg.t_values = {0.25, 0.5, 1.0};
  const auto estimates = mc::mc_estimate(spec, mccfg);
  for (const auto& e : estimates) {
    const double want = std::pow(e.t, 1.5);
    ck.expect(std::abs(e.mean - want) <= 3.0 * e.std_error,
              "E X_t^2 at t=" + std::to_string(e.t) + ": " + std::to_string(e.mean) + " +- " +
                  std::to_string(e.std_error) + " vs t^{2H} = " + std::to_string(want));
    ck.note("t=" + std::to_string(e.t) + ": mean " + std::to_string(e.mean) + " se " + std::to_string(e.std_error));
  }
  CriterionResult r;
  r.name = "mc-consistency";
  r.passed = ck.ok;
  r.summary = "E f(X_t) for the trivial equation matches t^{2H} within 3 s.e.";
  r.details["log"] = ck.log.str();
  return r;
}

// ---------------------------------------------------------------------------
// 6. Remainder decay for H > 1/2

CriterionResult c6_remainder_decay(const SuiteConfig& cfg) {
  Check ck;
  const double H = 0.75;
  Eigen::VectorXd a(1);
  a << 1.0;
  SdeSpec spec = make_spec(1, 1, H, a, {"0.5*x1"}, {{"0.5*x1"}}, "x1^2");
  const std::vector<double> t_grid = {0.4, 0.3, 0.2, 0.15, 0.1};

  mc::McConfig mccfg;
  mccfg.paths = scaled(200000, cfg);
  mccfg.steps = 512;
  mccfg.seed = derive_seed(cfg.seed, 6);
  mccfg.threads = cfg.threads;
  mccfg.t_values = t_grid;
  const auto estimates = mc::mc_estimate(spec, mccfg);

  json fits = json::array();
  for (const int m : {1, 2}) {
    const expansion::Expansion e = expansion::expand(spec, m);
    std::vector<double> ts, ys;
    json points = json::array();
    for (const auto& est : estimates) {
      const double ref = e.evaluate(est.t);
      const double diff = std::abs(est.mean - ref);
      const bool used = diff > 3.0 * est.std_error;
      if (used) {
        ts.push_back(est.t);
        ys.push_back(diff);
      }
      points.push_back({{"t", est.t}, {"difference", diff}, {"stderr", est.std_error}, {"used", used}});
    }
    const double target = (m + 1) * H;
    if (ts.size() < 2) {
      ck.note("m=" + std::to_string(m) + ": inconclusive (remainder below noise)");
      fits.push_back({{"m", m}, {"status", "inconclusive"}, {"points", points}});
      continue;
    }
    const double slope = mc::fit_log_slope(ts, ys);
    ck.expect(slope >= target - 0.15, "m=" + std::to_string(m) + ": slope " + std::to_string(slope) +
                                          " below target " + std::to_string(target) + " - 0.15");
    ck.note("m=" + std::to_string(m) + ": slope " + std::to_string(slope) + " (target " + std::to_string(target) +
            ")");
    fits.push_back({{"m", m}, {"slope", slope}, {"target", target}, {"points", points}});
  }
  CriterionResult r;
  r.name = "remainder-decay-young";
  r.passed = ck.ok;
  r.summary = "fitted |MC - expansion| slopes reach (m+1)H - 0.15 for m in {1,2}";
  r.details["fits"] = fits;
  r.details["log"] = ck.log.str();
  return r;
}

// ---------------------------------------------------------------------------
// 7. Remainder decay for 1/3 < H < 1/2

CriterionResult c7_rough_decay(const SuiteConfig& cfg) {
  Check ck;
  const double H = 0.4;
  Eigen::VectorXd a(1);
  a << 0.0;
  SdeSpec spec = make_spec(1, 1, H, a, {"0"}, {{"1"}}, "x1");
  const std::vector<double> t_grid = {0.4, 0.3, 0.2, 0.15, 0.1};

  mc::McConfig mccfg;
  mccfg.paths = scaled(20000, cfg);
  mccfg.steps = 512;
  mccfg.seed = derive_seed(cfg.seed, 7);
  mccfg.threads = cfg.threads;

  const auto fit11 = mc::iterated_integral_remainder_slope(MultiIndex{{1, 1}}, sym::Expr::constant(1.0), spec,
                                                           t_grid, mccfg);
  ck.expect(fit11.status == mc::SlopeFit::Status::Ok, "alpha=(1,1): fit inconclusive");
  if (fit11.status == mc::SlopeFit::Status::Ok) {
    ck.expect(std::abs(fit11.slope - 2.0 * H) <= 0.15, "alpha=(1,1): slope " + std::to_string(fit11.slope) +
                                                           " not within 0.15 of " + std::to_string(2.0 * H));
    ck.note("alpha=(1,1): slope " + std::to_string(fit11.slope) + " target " + std::to_string(fit11.target));
  }

  const auto fit00 = mc::iterated_integral_remainder_slope(MultiIndex{{0, 0}}, sym::Expr::constant(1.0), spec,
                                                           t_grid, mccfg);
  ck.expect(fit00.status == mc::SlopeFit::Status::Ok, "alpha=(0,0): fit inconclusive");
  if (fit00.status == mc::SlopeFit::Status::Ok) {
    ck.expect(std::abs(fit00.slope - 2.0) <= 0.02,
              "alpha=(0,0): slope " + std::to_string(fit00.slope) + " must be 2 +- 0.02");
    ck.note("alpha=(0,0): slope " + std::to_string(fit00.slope));
  }

  CriterionResult r;
  r.name = "remainder-decay-rough";
  r.passed = ck.ok;
  r.summary = "iterated-integral decay slopes match r - |alpha|(1-H) at H = 0.4";
  r.details["log"] = ck.log.str();
  return r;
}

// ---------------------------------------------------------------------------
// 8. Rough calculus toolkit

CriterionResult c8_rough_toolkit(const SuiteConfig& cfg) {
  Check ck;
  SplitMix64 rng(cfg.seed ^ 0x0ff1ceULL);
  // dyadic-rational data keeps the algebraic identities exact in floating point
  const auto dyadic = [&](int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = static_cast<double>(static_cast<long>(rng.next() % 2048) - 1024) / 1024.0;
    return v;
  };

  {
    const int N = 16;
    rough::GridFunction g{Grid(1.0, N), dyadic(N + 1)};
    const auto dd = rough::delta(rough::delta(g));
    double sup = 0.0;
    for (int s = 0; s <= N; ++s)
      for (int u = s; u <= N; ++u)
        for (int t = u; t <= N; ++t) sup = std::max(sup, std::abs(dd(s, u, t)));
    ck.expect(sup == 0.0, "delta(delta g) must vanish exactly, sup = " + std::to_string(sup));
  }

  {  // product rules, exact on dyadic data
    const int N = 12;
    const Grid grid(1.0, N);
    rough::GridFunction g{grid, dyadic(N + 1)};
    rough::GridFunction h{grid, dyadic(N + 1)};
    const auto dg = rough::delta(g);
    const auto dh = rough::delta(h);
    double worst1 = 0.0, worst2 = 0.0, worst3 = 0.0;
    for (int s = 0; s <= N; ++s)
      for (int u = s; u <= N; ++u)
        for (int t = u; t <= N; ++t) {
          if (s <= u && u <= t) {
            // C1 x C1: delta(gh)_st = delta g * h_t + g_s * delta h
            const double lhs1 = g.values[t] * h.values[t] - g.values[s] * h.values[s];
            const double rhs1 = dg(s, t) * h.values[t] + g.values[s] * dh(s, t);
            worst1 = std::max(worst1, std::abs(lhs1 - rhs1));
            // C1 x C2 with product (g h)_{st} = g_s h_st, here h_st = dh(s,t):
            // delta(g h)_{sut} = g_s (delta h)_{sut} - (delta g)_{su} h_{ut}
            const double lhs2 = g.values[s] * dh(s, t) - g.values[s] * dh(s, u) - g.values[u] * dh(u, t);
            const double rhs2 = -dg(s, u) * dh(u, t);  // delta h closed
            worst2 = std::max(worst2, std::abs(lhs2 - rhs2));
            // C2 x C1 with (h g)_{st} = h_st g_t:
            // delta(h g)_{sut} = (delta h)_{sut} g_t + h_{su} (delta g)_{ut}
            const double lhs3 = dh(s, t) * g.values[t] - dh(s, u) * g.values[u] - dh(u, t) * g.values[t];
            const double rhs3 = dh(s, u) * dg(u, t);
            worst3 = std::max(worst3, std::abs(lhs3 - rhs3));
          }
        }
    ck.expect(worst1 == 0.0, "C1xC1 product rule not exact: " + std::to_string(worst1));
    ck.expect(worst2 == 0.0, "C1xC2 product rule not exact: " + std::to_string(worst2));
    ck.expect(worst3 == 0.0, "C2xC1 product rule not exact: " + std::to_string(worst3));
  }

  {  // decomposition g = delta f + Lambda delta g
    const int N = 64;
    const Grid grid(1.0, N);
    Eigen::VectorXd u(N + 1), v(N + 1), w(N + 1);
    for (int k = 0; k <= N; ++k) {
      const double t = grid.time(k);
      u[k] = std::sin(3.0 * t);
      v[k] = std::cos(2.0 * t) + 0.3 * t;
      w[k] = std::exp(-t) * 0.5;
    }
    rough::Increment2 g{grid, Eigen::MatrixXd::Zero(N + 1, N + 1)};
    for (int s = 0; s <= N; ++s)
      for (int t = s; t <= N; ++t) g.h(s, t) = (u[t] - u[s]) * v[s] + (w[t] - w[s]);
    const auto lam = rough::sew(rough::delta(g));
    const auto f = rough::riemann_primitive(g);
    double worst = 0.0;
    for (int s = 0; s <= N; ++s)
      for (int t = s; t <= N; ++t)
        worst = std::max(worst, std::abs(g(s, t) - (f.values[t] - f.values[s]) - lam(s, t)));
    ck.expect(worst <= 1e-12, "decomposition defect " + std::to_string(worst));

    // delta(Lambda h) = h exactly on triples
    const auto dl = rough::delta(lam);
    const auto dg = rough::delta(g);
    double worst2 = 0.0;
    for (int s = 0; s <= N; s += 3)
      for (int uu = s; uu <= N; uu += 2)
        for (int t = uu; t <= N; t += 3) worst2 = std::max(worst2, std::abs(dl(s, uu, t) - dg(s, uu, t)));
    ck.expect(worst2 <= 1e-12, "delta Lambda != delta g, defect " + std::to_string(worst2));
  }

  {  // Lambda norm bound with 2% slack on dyadic grids
    const double kappa = 0.35, gamma = 0.38;
    const double mu = 2.0 * kappa + gamma;
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const int N = 128;
      const Grid grid(1.0, N);
      const fbm::FbmPath pa = fbm::sample_path(0.42, grid, 1, derive_seed(cfg.seed, 80 + trial));
      const fbm::FbmPath pb = fbm::sample_path(0.40, grid, 1, derive_seed(cfg.seed, 90 + trial));
      // closed 2-increment h_{sut} = (delta a)_{su} (delta b)_{ut}
      const Eigen::VectorXd av = pa.values.row(0), bv = pb.values.row(0);
      rough::Increment3 h{grid, [av, bv](int s, int u, int t) {
                            return (av[u] - av[s]) * (bv[t] - bv[u]);
                          }};
      const auto lam = rough::sew(h, 1e-10);
      const double ratio = rough::holder_seminorm(lam, mu) / rough::holder_seminorm(h, mu);
      worst_ratio = std::max(worst_ratio, ratio);
    }
    const double bound = 1.02 / (std::pow(2.0, mu) - 2.0);
    ck.expect(worst_ratio <= bound, "Lambda bound ratio " + std::to_string(worst_ratio) + " above 1.02/(2^mu-2) = " +
                                        std::to_string(bound));
    ck.note("Lambda ratio " + std::to_string(worst_ratio) + " vs bound " + std::to_string(bound));
  }

  {  // change-of-variable residual decays under dyadic refinement
    const int fine = 1 << 12;
    const fbm::FbmPath fine_path = fbm::sample_path(0.5, Grid(1.0, fine), 1, derive_seed(cfg.seed, 88));
    const sym::Expr f = sym::parse("x1^2");
    const sym::Expr psi = sym::parse("sin(x1)");
    const sym::Expr dpsi = sym::differentiate(psi, 1);
    std::vector<double> residuals;
    for (int level = 6; level <= 10; ++level) {
      const int steps = 1 << level;
      const fbm::FbmPath x = fbm::subsample(fine_path, fine / steps);
      const fbm::AreaProcess area = fbm::levy_area(fine_path, fine / steps);
      rough::ControlledRow m{x.grid, Eigen::MatrixXd(1, steps + 1), {}};
      m.slope.assign(steps + 1, Eigen::MatrixXd(1, 1));
      for (int k = 0; k <= steps; ++k) {
        Eigen::VectorXd state(1);
        state << x.values(0, k);
        m.values(0, k) = psi.eval(state);
        m.slope[k](0, 0) = dpsi.eval(state);
      }
      Eigen::VectorXd z0(1);
      z0 << 0.2;
      const rough::ControlledPath z = rough::integrate_controlled({m}, x, area, z0);
      residuals.push_back(rough::ito_residual(f, z, {m}, x, area));
    }
    bool decreasing = true;
    std::ostringstream seq;
    for (std::size_t i = 0; i < residuals.size(); ++i) {
      seq << residuals[i] << " ";
      if (i > 0 && residuals[i] >= residuals[i - 1]) decreasing = false;
    }
    ck.expect(decreasing, "residuals not strictly decreasing: " + seq.str());
    ck.note("residual sequence: " + seq.str());
  }

  CriterionResult r;
  r.name = "rough-toolkit";
  r.passed = ck.ok;
  r.summary = "delta/product identities exact, decomposition 1e-12, Lambda bound, residual decay";
  r.details["log"] = ck.log.str();
  return r;
}

// ---------------------------------------------------------------------------
// 9. Area process: Chen relation, symmetric part, scaling of |x2|^2

CriterionResult c9_area(const SuiteConfig& cfg) {
  Check ck;
  const double H = 0.4;
  const int N = 1024;
  const Grid grid(1.0, N);
  {
    const fbm::FbmPath path = fbm::sample_path(H, grid, 2, derive_seed(cfg.seed, 9));
    const auto fine = fbm::levy_area(path, 16);
    const auto coarse = fbm::levy_area(path, 32);
    double worst_chen = 0.0, worst_sym = 0.0, worst_diag = 0.0;
    for (int b = 0; b + 1 < static_cast<int>(fine.blocks.size()); b += 2) {
      const Eigen::MatrixXd& su = fine.blocks[b];
      const Eigen::MatrixXd& ut = fine.blocks[b + 1];
      const Eigen::VectorXd dsu = path.values.col((b + 1) * 16) - path.values.col(b * 16);
      const Eigen::VectorXd dut = path.values.col((b + 2) * 16) - path.values.col((b + 1) * 16);
      const Eigen::MatrixXd chen = su + ut + dsu * dut.transpose();
      worst_chen = std::max(worst_chen, (chen - coarse.blocks[b / 2]).cwiseAbs().maxCoeff());
    }
    for (std::size_t b = 0; b < coarse.blocks.size(); ++b) {
      const Eigen::VectorXd db =
          path.values.col(static_cast<int>(b + 1) * 32) - path.values.col(static_cast<int>(b) * 32);
      const Eigen::MatrixXd sym = 0.5 * (coarse.blocks[b] + coarse.blocks[b].transpose());
      worst_sym = std::max(worst_sym, (sym - 0.5 * db * db.transpose()).cwiseAbs().maxCoeff());
      for (int i = 0; i < 2; ++i)
        worst_diag = std::max(worst_diag, std::abs(coarse.blocks[b](i, i) - 0.5 * db[i] * db[i]));
    }
    ck.expect(worst_chen <= 1e-13, "Chen relation defect " + std::to_string(worst_chen));
    ck.expect(worst_sym <= 1e-13, "symmetric-part defect " + std::to_string(worst_sym));
    ck.expect(worst_diag <= 1e-13, "diagonal != (dB)^2/2, defect " + std::to_string(worst_diag));
  }

  // E |x2(1,2)|^2 / dt^{4H} stable across block sizes
  const long paths = scaled(2000, cfg);
  std::vector<double> means, ses;
  std::vector<int> blocks = {16, 32, 64};
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const int block = blocks[bi];
    const double dt4h = std::pow(grid.dt() * block, 4.0 * H);
    double sum = 0.0, sum2 = 0.0;
    fbm::FbmSampler sampler(H, grid, 2);
    for (long p = 0; p < paths; ++p) {
      const fbm::FbmPath path = sampler.sample(derive_seed(cfg.seed, 9000 + bi * 100000 + p));
      const auto area = fbm::levy_area(path, block);
      double acc = 0.0;
      for (const auto& a : area.blocks) acc += a(0, 1) * a(0, 1);
      const double v = acc / area.blocks.size() / dt4h;
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / paths;
    const double var = std::max(0.0, sum2 / paths - mean * mean);
    means.push_back(mean);
    ses.push_back(std::sqrt(var / paths));
  }
  for (std::size_t i = 0; i + 1 < means.size(); ++i) {
    const double tol = 3.0 * std::sqrt(ses[i] * ses[i] + ses[i + 1] * ses[i + 1]);
    ck.expect(std::abs(means[i] - means[i + 1]) <= tol,
              "normalized E|x2|^2 differs across blocks " + std::to_string(blocks[i]) + "/" +
                  std::to_string(blocks[i + 1]) + ": " + std::to_string(means[i]) + " vs " +
                  std::to_string(means[i + 1]));
    ck.note("block " + std::to_string(blocks[i]) + ": " + std::to_string(means[i]) + " +- " +
            std::to_string(ses[i]));
  }

  CriterionResult r;
  r.name = "area-chen";
  r.passed = ck.ok;
  r.summary = "Chen and symmetric-part identities to round-off; |x2|^2 scaling stable across blocks";
  r.details["log"] = ck.log.str();
  return r;
}

// ---------------------------------------------------------------------------
// 10. Variational equation against the closed-form sensitivity

CriterionResult c10_variational(const SuiteConfig& cfg) {
  Check ck;
  Eigen::VectorXd a(1);
  a << 1.0;
  SdeSpec spec = make_spec(1, 1, 0.75, a, {"0"}, {{"x1"}}, "x1");
  const int N = 1 << 12;
  const Grid grid(1.0, N);
  for (int trial = 0; trial < 10; ++trial) {
    const fbm::FbmPath path = fbm::sample_path(0.75, grid, 1, derive_seed(cfg.seed, 100 + trial));
    const auto traj = solver::solve_young(spec, path, solver::Scheme::Heun);
    const int s_index = N / 4;
    const auto dpath = solver::variational_path(spec, path, traj, s_index, 1);
    for (const int k : {N / 2, N}) {
      // For sigma(x) = x, D_s X_t = sigma(X_s) X_t / X_s = X_t.
      const double want = traj.states(0, k);
      const double got = dpath.values(0, k);
      ck.expect(std::abs(got - want) <= 0.02 * std::abs(want),
                "trial " + std::to_string(trial) + ", t index " + std::to_string(k) + ": D_s X_t " +
                    std::to_string(got) + " vs closed form " + std::to_string(want));
    }
    ck.expect(dpath.values.leftCols(s_index).cwiseAbs().maxCoeff() == 0.0, "D_s X_t must vanish for t < s");
  }
  CriterionResult r;
  r.name = "variational";
  r.passed = ck.ok;
  r.summary = "pathwise sensitivity matches sigma(X_s) X_t / X_s within 2% at N = 4096";
  r.details["log"] = ck.log.str();
  return r;
}

// ---------------------------------------------------------------------------
// 11. Second-moment growth shape

CriterionResult c11_growth(const SuiteConfig&) {
  Check ck;
  const double H = 0.75;
  std::vector<double> q(7, 0.0);
  double fact = 1.0;
  for (int m = 1; m <= 6; ++m) {
    fact *= m;
    const MultiIndex word{std::vector<int>(m, 1)};
    const auto r = moments::second_moment_iterated_integral(word, H);
    q[m] = std::sqrt(fact * r.value);
    if (m <= 3) {
      moments::MomentOptions force;
      force.force_pairing = true;
      const auto rp = moments::second_moment_iterated_integral(word, H, force);
      ck.expect(std::abs(rp.value - r.value) <= 3.0 * rp.error_estimate + 1e-7,
                "pairing route second moment mismatch at m=" + std::to_string(m) + ": " +
                    std::to_string(rp.value) + " vs closed form " + std::to_string(r.value));
    }
  }
  double fitted_k = 0.0;
  for (int m = 1; m <= 6; ++m) fitted_k = std::max(fitted_k, std::pow(q[m], 1.0 / m));
  ck.note("fitted K = " + std::to_string(fitted_k));
  ck.expect(fitted_k <= 1.45, "fitted K exceeds the geometric-growth envelope: " + std::to_string(fitted_k));
  for (int m = 1; m <= 6; ++m) {
    ck.expect(q[m] <= std::pow(fitted_k, m) * (1.0 + 1e-12),
              "sqrt(m!) * moment^(1/2) exceeds K^m at m=" + std::to_string(m));
  }
  // increments of q_m^{1/m} should shrink (the normalized sequence levels off)
  for (int m = 2; m <= 5; ++m) {
    const double inc1 = std::pow(q[m], 1.0 / m) - std::pow(q[m - 1], 1.0 / (m - 1));
    const double inc2 = std::pow(q[m + 1], 1.0 / (m + 1)) - std::pow(q[m], 1.0 / m);
    ck.expect(inc2 <= inc1 + 1e-9, "q_m^{1/m} increments must shrink at m=" + std::to_string(m));
  }
  CriterionResult r;
  r.name = "moment-growth";
  r.passed = ck.ok;
  r.summary = "sqrt(m!) second-moment growth stays under a fitted geometric envelope for m <= 6";
  r.details["log"] = ck.log.str();
  return r;
}

}  // namespace

const std::vector<std::string>& criterion_names() {
  static const std::vector<std::string> names = {
      "tree-census",     "moment-goldens",   "m2-closed-form",        "trivial-series",
      "mc-consistency",  "remainder-decay-young", "remainder-decay-rough", "rough-toolkit",
      "area-chen",       "variational",      "moment-growth",
  };
  return names;
}

SuiteReport run_suite(const SuiteConfig& config) {
  using CriterionFn = std::function<CriterionResult(const SuiteConfig&)>;
  const std::vector<std::pair<std::string, CriterionFn>> registry = {
      {"tree-census", c1_trees},
      {"moment-goldens", c2_moments},
      {"m2-closed-form", c3_m2_identity},
      {"trivial-series", c4_trivial_series},
      {"mc-consistency", c5_mc_consistency},
      {"remainder-decay-young", c6_remainder_decay},
      {"remainder-decay-rough", c7_rough_decay},
      {"rough-toolkit", c8_rough_toolkit},
      {"area-chen", c9_area},
      {"variational", c10_variational},
      {"moment-growth", c11_growth},
  };

  SuiteReport report;
  for (const auto& [name, fn] : registry) {
    if (!config.criteria.empty() &&
        std::find(config.criteria.begin(), config.criteria.end(), name) == config.criteria.end())
      continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult result;
    try {
      result = fn(config);
    } catch (const std::exception& err) {
      result.name = name;
      result.passed = false;
      result.summary = std::string("exception: ") + err.what();
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (config.verbose) {
      std::printf("[%s] %-22s %7.2fs  %s\n", result.passed ? "PASS" : "FAIL", result.name.c_str(), result.seconds,
                  result.summary.c_str());
      std::fflush(stdout);
    }
    report.all_passed = report.all_passed && result.passed;
    report.results.push_back(std::move(result));
  }
  return report;
}

json SuiteReport::to_json() const {
  json out;
  out["all_passed"] = all_passed;
  json list = json::array();
  for (const auto& r : results)
    list.push_back({{"name", r.name}, {"passed", r.passed}, {"seconds", r.seconds}, {"summary", r.summary},
                    {"details", r.details}});
  out["criteria"] = list;
  return out;
}

std::string SuiteReport::to_text() const {
  std::ostringstream os;
  for (const auto& r : results)
    os << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.seconds << "s): " << r.summary << "\n";
  os << (all_passed ? "all criteria passed" : "SOME CRITERIA FAILED") << "\n";
  return os.str();
}

}  // namespace fracdev::suite
