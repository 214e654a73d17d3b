#pragma once

#include <cstdint>
#include <vector>

#include "fracdev/expansion.hpp"
#include "fracdev/sde_spec.hpp"
#include "fracdev/solver.hpp"

namespace fracdev::mc {

struct McConfig {
  long paths = 10000;
  int steps = 256;  // per run over [0, t]
  std::uint64_t seed = 1;
  solver::Scheme scheme = solver::Scheme::Heun;
  std::vector<double> t_values = {1.0};
  bool antithetic = true;
  int threads = 0;                     // 0 = hardware concurrency
  double max_failure_fraction = 1e-3;  // run aborts beyond this
};

struct Estimate {
  double t = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  long paths = 0;
  long failures = 0;
};

/// E f(X_t) per requested t; independent paths with derived seeds, pairwise
/// aggregation, antithetic pairing by default. Deterministic given the seed.
std::vector<Estimate> mc_estimate(const SdeSpec& spec, const McConfig& config);

struct SlopePoint {
  double t = 0.0;
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  double reference = 0.0;   // expansion value (or 0 for absolute-moment fits)
  double difference = 0.0;  // |mc - reference|
  bool used = false;        // excluded when the remainder drowns in noise
};

struct SlopeFit {
  enum class Status { Ok, Inconclusive };
  Status status = Status::Inconclusive;
  double slope = 0.0;
  double target = 0.0;
  std::vector<SlopePoint> points;
};

/// Least-squares slope of log |E f(X_t) - expansion_m(t)| against log t over
/// a geometric t-grid; points with |difference| < 3 stderr are excluded, and
/// fewer than two usable points yields Inconclusive.
SlopeFit remainder_slope(const SdeSpec& spec, int order, const std::vector<double>& t_grid, const McConfig& config,
                         const expansion::ExpandOptions& expand_options = {});

/// Decay rate of E | \int_{Delta^r([0,t])} g(X) dB^alpha | against the target
/// r - |alpha| (1-H); piecewise-linear iterated integrals along rough-solver
/// trajectories (g = 1 uses the exact signature).
SlopeFit iterated_integral_remainder_slope(const MultiIndex& alpha, const sym::Expr& g, const SdeSpec& spec,
                                           const std::vector<double>& t_grid, const McConfig& config);

/// Least-squares fit of log y = a + slope * log t.
double fit_log_slope(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace fracdev::mc
