#include "fracdev/iterated_moments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "fracdev/path_signature.hpp"
#include "fracdev/quadrature.hpp"
#include "fracdev/rng.hpp"

namespace fracdev::moments {

namespace {

constexpr double kH_floor = 0.5;

void require_pairing_regime(double hurst) {
  if (!(hurst > kH_floor && hurst < 1.0))
    throw std::invalid_argument("moments: the pairing kernel holds for 1/2 < H < 1; use the Monte Carlo route");
}

double lgamma_(double x) { return std::lgamma(x); }

// ---------------------------------------------------------------------------
// Reduced integrals over the standard simplex {x >= 0, sum x = 1}:
//   I(g, spans) = \int prod_i x_i^{g_i} prod_j (sum_{i in span_j} x_i)^theta
// with integer exponents g_i >= 0 and inclusive var ranges span_j = [a,b].

struct Reduced {
  std::vector<int> g;
  std::vector<std::pair<int, int>> spans;
};

std::string reduced_key(const Reduced& r, double theta) {
  std::ostringstream os;
  for (int v : r.g) os << v << ',';
  os << '|';
  for (auto [a, b] : r.spans) os << a << '-' << b << ',';
  os << '|' << theta;
  return os.str();
}

double dirichlet_value(const std::vector<int>& g) {
  double num = 0.0, denom = 0.0;
  for (int gi : g) {
    num += lgamma_(gi + 1.0);
    denom += gi + 1.0;
  }
  return std::exp(num - lgamma_(denom));
}

double pow_int(double x, int n) {
  double out = 1.0;
  while (n-- > 0) out *= x;
  return out;
}

KernelIntegral eval_reduced(const Reduced& r, double theta, const MomentOptions& options);

// Irreducible component: no span covers all vars, spans connect everything.
KernelIntegral eval_irreducible(const Reduced& r, double theta, const MomentOptions& options) {
  const int M = static_cast<int>(r.g.size());
  const int dim = M - 1;

  const auto integrand_y = [&](const double* y) {
    double out = 1.0;
    for (int i = 0; i < M; ++i) out *= pow_int(y[i], r.g[i]);
    for (auto [a, b] : r.spans) {
      double s = 0.0;
      for (int i = a; i <= b; ++i) s += y[i];
      out *= std::pow(s, theta);
    }
    return out;
  };

  if (dim <= 3) {
    // Stick-breaking map of (0,1)^dim onto the simplex.
    const int level = dim <= 2 ? options.quad_level_2d : options.quad_level_3d;
    const auto f = [&](const quad::Node* v) {
      double y[9];
      double rest = 1.0;
      for (int i = 0; i < dim; ++i) {
        y[i] = v[i].x * rest;
        rest *= v[i].xc;
      }
      y[dim] = rest;
      double jac = 1.0;
      for (int j = 0; j < dim - 1; ++j) jac *= pow_int(v[j].xc, dim - 1 - j);
      return integrand_y(y) * jac;
    };
    const double value = quad::integrate_cube(dim, f, level);
    const double ref = quad::integrate_cube(dim, f, level - 1);
    return {value, std::abs(value - ref), false};
  }

  // Dirichlet-weighted Monte Carlo: x ~ Dir(g+1), value = Dir-norm * E prod S^theta.
  SplitMix64 rng(options.mc_seed ^ 0x9e3779b97f4a7c15ULL);
  double sum = 0.0, sum2 = 0.0;
  std::vector<double> y(M);
  for (long p = 0; p < options.mc_points; ++p) {
    double total = 0.0;
    for (int i = 0; i < M; ++i) {
      // Gamma(g_i + 1) as a sum of exponentials (integer shape).
      double gamma = 0.0;
      for (int s = 0; s <= r.g[i]; ++s) gamma -= std::log(rng.uniform01());
      y[i] = gamma;
      total += gamma;
    }
    double f = 1.0;
    for (auto [a, b] : r.spans) {
      double s = 0.0;
      for (int i = a; i <= b; ++i) s += y[i];
      f *= std::pow(s / total, theta);
    }
    sum += f;
    sum2 += f * f;
  }
  const double mean = sum / options.mc_points;
  const double var = std::max(0.0, sum2 / options.mc_points - mean * mean);
  const double norm = dirichlet_value(r.g);
  return {norm * mean, norm * std::sqrt(var / options.mc_points), false};
}

KernelIntegral eval_reduced_impl(Reduced r, double theta, const MomentOptions& options) {
  const int M = static_cast<int>(r.g.size());

  // Spans covering every variable reduce to 1 on the normalized simplex.
  std::erase_if(r.spans, [&](const std::pair<int, int>& s) { return s.first == 0 && s.second == M - 1; });

  if (r.spans.empty()) return {dirichlet_value(r.g), 0.0, true};

  // Connected components of overlapping spans (unions of intervals).
  std::sort(r.spans.begin(), r.spans.end());
  std::vector<std::pair<int, int>> comps;           // var ranges
  std::vector<std::vector<std::pair<int, int>>> comp_spans;
  for (auto span : r.spans) {
    if (!comps.empty() && span.first <= comps.back().second) {
      comps.back().second = std::max(comps.back().second, span.second);
      comp_spans.back().push_back(span);
    } else {
      comps.push_back(span);
      comp_spans.push_back({span});
    }
  }

  if (comps.size() == 1 && comps[0].first == 0 && comps[0].second == M - 1) {
    return eval_irreducible(r, theta, options);  // nothing to factor out
  }

  // Group factorization: each component becomes one aggregated variable.
  double log_factor = 0.0;
  double total_exponent = 0.0;
  KernelIntegral inner_total{1.0, 0.0, true};
  int var = 0;
  int comp_idx = 0;
  while (var < M) {
    if (comp_idx < static_cast<int>(comps.size()) && comps[comp_idx].first == var) {
      const auto [lo, hi] = comps[comp_idx];
      Reduced sub;
      sub.g.assign(r.g.begin() + lo, r.g.begin() + hi + 1);
      for (auto [a, b] : comp_spans[comp_idx]) sub.spans.emplace_back(a - lo, b - lo);
      const KernelIntegral inner = eval_reduced(sub, theta, options);

      double nu = theta * static_cast<double>(comp_spans[comp_idx].size());
      for (int i = lo; i <= hi; ++i) nu += r.g[i];
      const int width = hi - lo + 1;
      log_factor += lgamma_(nu + width);
      total_exponent += nu + width;

      // first-order error propagation through the product
      inner_total.error = std::abs(inner_total.value) * inner.error + std::abs(inner.value) * inner_total.error;
      inner_total.value *= inner.value;
      inner_total.exact = inner_total.exact && inner.exact;

      var = hi + 1;
      ++comp_idx;
    } else {
      log_factor += lgamma_(r.g[var] + 1.0);
      total_exponent += r.g[var] + 1.0;
      ++var;
    }
  }
  const double scale = std::exp(log_factor - lgamma_(total_exponent));
  return {scale * inner_total.value, scale * inner_total.error, inner_total.exact};
}

KernelIntegral eval_reduced(const Reduced& r, double theta, const MomentOptions& options) {
  static std::mutex mutex;
  static std::map<std::string, KernelIntegral> cache;
  const std::string key = reduced_key(r, theta);
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const KernelIntegral out = eval_reduced_impl(r, theta, options);
  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(key, out);
  return out;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double double_factorial_odd(int n) {  // (n)!! for odd n >= -1
  double f = 1.0;
  for (int i = n; i >= 3; i -= 2) f *= i;
  return f;
}

}  // namespace

std::vector<Matching> valid_matchings(const MultiIndex& alpha) {
  std::vector<int> positions = alpha.nonzero_positions();
  std::vector<Matching> out;
  if (positions.size() % 2 != 0) return out;
  std::vector<std::pair<int, int>> current;
  std::vector<bool> used(positions.size(), false);
  const auto recurse = [&](auto&& self, std::size_t done) -> void {
    if (done == positions.size()) {
      out.push_back(Matching{current});
      return;
    }
    std::size_t first = 0;
    while (used[first]) ++first;
    used[first] = true;
    for (std::size_t second = first + 1; second < positions.size(); ++second) {
      if (used[second]) continue;
      if (alpha.word[positions[first]] != alpha.word[positions[second]]) continue;
      used[second] = true;
      current.emplace_back(positions[first], positions[second]);
      self(self, done + 2);
      current.pop_back();
      used[second] = false;
    }
    used[first] = false;
  };
  recurse(recurse, 0);
  return out;
}

KernelIntegral simplex_kernel_integral(int k, const std::vector<std::pair<int, int>>& pairs, double hurst,
                                       const MomentOptions& options) {
  require_pairing_regime(hurst);
  if (k < 0) throw std::invalid_argument("simplex_kernel_integral: k must be >= 0");
  if (k == 0) return {1.0, 0.0, true};
  const double theta = 2.0 * hurst - 2.0;

  std::vector<int> endpoints;
  for (auto [p, q] : pairs) {
    if (p < 0 || q >= k || p >= q) throw std::invalid_argument("simplex_kernel_integral: bad pair positions");
    endpoints.push_back(p);
    endpoints.push_back(q);
  }
  std::sort(endpoints.begin(), endpoints.end());
  if (std::adjacent_find(endpoints.begin(), endpoints.end()) != endpoints.end())
    throw std::invalid_argument("simplex_kernel_integral: positions must be distinct");

  if (pairs.empty()) return {1.0 / factorial(k), 0.0, true};

  const int twoq = static_cast<int>(endpoints.size());
  // gap g_i between consecutive paired positions; ranks are 1-based
  std::vector<int> g(twoq + 1, 0);
  double log_free = 0.0;
  {
    int prev = -1;
    for (int r = 0; r < twoq; ++r) {
      g[r] = endpoints[r] - prev - 1;
      prev = endpoints[r];
    }
    g[twoq] = k - 1 - prev;
    for (int gi : g) log_free += lgamma_(gi + 1.0);
  }
  Reduced reduced;
  reduced.g = g;
  for (auto [p, q] : pairs) {
    const int a = static_cast<int>(std::lower_bound(endpoints.begin(), endpoints.end(), p) - endpoints.begin()) + 1;
    const int b = static_cast<int>(std::lower_bound(endpoints.begin(), endpoints.end(), q) - endpoints.begin()) + 1;
    reduced.spans.emplace_back(a, b - 1);  // gap vars between ranks a and b
  }
  KernelIntegral inner = eval_reduced(reduced, theta, options);
  const double scale = std::exp(-log_free);
  return {scale * inner.value, scale * inner.error, inner.exact};
}

namespace {

MomentResult combine_matchings(const MultiIndex& alpha, double hurst, const std::vector<Matching>& matchings,
                               int simplex_len, const MomentOptions& options) {
  const double gamma_h = hurst * (2.0 * hurst - 1.0);
  const int q = alpha.weight() / 2;
  MomentResult out;
  out.matchings = static_cast<int>(matchings.size());
  bool exact = true;
  double value = 0.0, error = 0.0;
  for (const auto& m : matchings) {
    const KernelIntegral ki = simplex_kernel_integral(simplex_len, m.pairs, hurst, options);
    value += ki.value;
    error += ki.error;
    exact = exact && ki.exact;
  }
  const double prefactor = std::pow(gamma_h, q);
  out.value = prefactor * value;
  out.error_estimate = prefactor * error;
  out.method = exact ? MomentResult::Method::ExactClosedForm : MomentResult::Method::Quadrature;
  if (exact) out.error_estimate = 0.0;
  return out;
}

}  // namespace

MomentResult expected_iterated_integral(const MultiIndex& alpha, double hurst, const MomentOptions& options) {
  const int k = alpha.length();
  if (k > options.max_length)
    throw std::length_error("expected_iterated_integral: word longer than the configured cap");

  if (alpha.all_zero()) return {1.0 / factorial(k), 0.0, MomentResult::Method::ExactClosedForm, k == 0 ? 0 : 1};

  require_pairing_regime(hurst);

  // Odd count for any letter kills every matching.
  for (int letter : alpha.word) {
    if (letter == 0) continue;
    if (alpha.positions_of(letter).size() % 2 != 0)
      return {0.0, 0.0, MomentResult::Method::ExactClosedForm, 0};
  }

  if (alpha.pure_single_letter() && !options.force_pairing) {
    // \int dB^(i,...,i) = B_1^k / k!, so the moment is (k-1)!!/k!.
    MomentResult out;
    out.value = double_factorial_odd(k - 1) / factorial(k);
    out.method = MomentResult::Method::ExactClosedForm;
    out.matchings = static_cast<int>(double_factorial_odd(k - 1));
    return out;
  }

  const auto matchings = valid_matchings(alpha);
  if (matchings.empty()) return {0.0, 0.0, MomentResult::Method::ExactClosedForm, 0};
  return combine_matchings(alpha, hurst, matchings, k, options);
}

namespace {

// Doubled word on the product of two simplices, decomposed into shuffles.
MomentResult second_moment_by_shuffles(const MultiIndex& alpha, double hurst, const MomentOptions& options) {
  const int k = alpha.length();
  std::vector<int> doubled = alpha.word;
  doubled.insert(doubled.end(), alpha.word.begin(), alpha.word.end());
  const MultiIndex alpha2{std::move(doubled)};
  const auto matchings = valid_matchings(alpha2);
  if (matchings.empty()) return {0.0, 0.0, MomentResult::Method::ExactClosedForm, 0};

  // All interleavings: choose the merged slots of copy 1.
  std::vector<std::array<std::vector<int>, 2>> shuffles;
  std::vector<int> pick;
  const auto rec = [&](auto&& self, int next, int chosen) -> void {
    if (chosen == k) {
      std::array<std::vector<int>, 2> maps;
      maps[0].resize(k);
      maps[1].resize(k);
      int i1 = 0, i2 = 0;
      for (int pos = 0; pos < 2 * k; ++pos) {
        if (i1 < k && pick.size() > static_cast<std::size_t>(i1) && pick[i1] == pos) maps[0][i1++] = pos;
        else maps[1][i2++] = pos;
      }
      shuffles.push_back(std::move(maps));
      return;
    }
    if (2 * k - next < k - chosen) return;
    for (int pos = next; pos < 2 * k; ++pos) {
      pick.push_back(pos);
      self(self, pos + 1, chosen + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0, 0);

  const double gamma_h = hurst * (2.0 * hurst - 1.0);
  const int q = alpha.weight();
  double value = 0.0, error = 0.0;
  bool exact = true;
  for (const auto& m : matchings) {
    for (const auto& maps : shuffles) {
      std::vector<std::pair<int, int>> merged;
      merged.reserve(m.pairs.size());
      for (auto [p, qq] : m.pairs) {
        const int a = p < k ? maps[0][p] : maps[1][p - k];
        const int b = qq < k ? maps[0][qq] : maps[1][qq - k];
        merged.emplace_back(std::min(a, b), std::max(a, b));
      }
      const KernelIntegral ki = simplex_kernel_integral(2 * k, merged, hurst, options);
      value += ki.value;
      error += ki.error;
      exact = exact && ki.exact;
    }
  }
  MomentResult out;
  out.matchings = static_cast<int>(matchings.size());
  out.value = std::pow(gamma_h, q) * value;
  out.error_estimate = exact ? 0.0 : std::pow(gamma_h, q) * error;
  out.method = exact ? MomentResult::Method::ExactClosedForm : MomentResult::Method::Quadrature;
  return out;
}

}  // namespace

MomentResult second_moment_iterated_integral(const MultiIndex& alpha, double hurst, const MomentOptions& options) {
  const int k = alpha.length();
  if (k > options.max_length)
    throw std::length_error("second_moment_iterated_integral: word longer than the configured cap");
  if (k == 0) return {1.0, 0.0, MomentResult::Method::ExactClosedForm, 0};

  if (alpha.all_zero()) {
    const double v = 1.0 / factorial(k);
    return {v * v, 0.0, MomentResult::Method::ExactClosedForm, 0};
  }

  if (alpha.pure_single_letter() && !options.force_pairing) {
    // E (B_1^k / k!)^2 = (2k-1)!! / (k!)^2
    MomentResult out;
    out.value = double_factorial_odd(2 * k - 1) / (factorial(k) * factorial(k));
    out.method = MomentResult::Method::ExactClosedForm;
    return out;
  }

  require_pairing_regime(hurst);

  if (k <= 3 || (options.force_pairing && k <= 4)) return second_moment_by_shuffles(alpha, hurst, options);

  // Long mixed words: path Monte Carlo.
  const PathEstimate est = mc_second_moment_iterated_integral(alpha, hurst, 20000, 512, options.mc_seed);
  MomentResult out;
  out.value = est.mean;
  out.error_estimate = est.std_error;
  out.method = MomentResult::Method::MonteCarlo;
  return out;
}

std::pair<MultiIndex, MultiIndex> derivative_split(const MultiIndex& alpha, int component, int position) {
  if (position < 1 || position > alpha.length())
    throw std::out_of_range("derivative_split: position must lie in 1..l(alpha)");
  if (alpha.word[position - 1] != component)
    throw std::invalid_argument("derivative_split: the word does not carry that component at the position");
  MultiIndex left{std::vector<int>(alpha.word.begin(), alpha.word.begin() + position - 1)};
  MultiIndex right{std::vector<int>(alpha.word.begin() + position, alpha.word.end())};
  return {left, right};
}

// ---------------------------------------------------------------------------
// Monte Carlo estimates along sampled paths

namespace {

int max_component(const MultiIndex& alpha) {
  int m = 1;
  for (int a : alpha.word) m = std::max(m, a);
  return m;
}

template <typename Fn>
PathEstimate run_paths(double hurst, int dim, long paths, int steps, std::uint64_t seed, Fn&& per_path) {
  fbm::FbmSampler sampler(hurst, Grid(1.0, steps), dim);
  double sum = 0.0, sum2 = 0.0;
  for (long p = 0; p < paths; ++p) {
    const fbm::FbmPath path = sampler.sample(derive_seed(seed, p));
    const double v = per_path(path);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / paths;
  const double var = std::max(0.0, (sum2 / paths - mean * mean) / std::max<long>(paths - 1, 1));
  return {mean, std::sqrt(var), paths};
}

}  // namespace

PathEstimate mc_expected_iterated_integral(const MultiIndex& alpha, double hurst, long paths, int steps,
                                           std::uint64_t seed) {
  return run_paths(hurst, max_component(alpha), paths, steps, seed,
                   [&](const fbm::FbmPath& path) { return sig::iterated_integral(path, alpha, 0, steps); });
}

PathEstimate mc_second_moment_iterated_integral(const MultiIndex& alpha, double hurst, long paths, int steps,
                                                std::uint64_t seed) {
  return run_paths(hurst, max_component(alpha), paths, steps, seed, [&](const fbm::FbmPath& path) {
    const double v = sig::iterated_integral(path, alpha, 0, steps);
    return v * v;
  });
}

PositivityReport positivity_check(const std::vector<PositivityTerm>& terms, double hurst, long paths, int steps,
                                  std::uint64_t seed) {
  int dim = 1;
  for (const auto& t : terms) dim = std::max(dim, max_component(t.alpha));
  const auto est = run_paths(hurst, dim, paths, steps, seed, [&](const fbm::FbmPath& path) {
    double prod = 1.0;
    for (const auto& t : terms) {
      const int k0 = static_cast<int>(std::lround(t.t0 * steps));
      const int k1 = static_cast<int>(std::lround(t.t1 * steps));
      prod *= sig::iterated_integral(path, t.alpha, k0, k1);
    }
    return prod;
  });
  PositivityReport report;
  report.estimate = est.mean;
  report.std_error = est.std_error;
  report.flagged = est.mean < -3.0 * est.std_error;
  return report;
}

}  // namespace fracdev::moments
