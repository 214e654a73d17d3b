#include "fracdev/monte_carlo.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "fracdev/parallel.hpp"
#include "fracdev/path_signature.hpp"
#include "fracdev/rng.hpp"

namespace fracdev::mc {

namespace {

struct PathValues {
  std::vector<double> value;  // per pair (antithetic) or per path
  long failures = 0;
};

// Runs `paths` path functionals at horizon t; with antithetic pairing the
// returned samples are pair averages (still i.i.d.).
template <typename Fn>
PathValues run_paths(const SdeSpec& spec, double t, const McConfig& config, std::uint64_t stream, Fn&& value_of) {
  const Grid grid(t, config.steps);
  fbm::FbmSampler sampler(spec.hurst, grid, spec.d);
  const long samples = config.antithetic ? (config.paths + 1) / 2 : config.paths;
  std::vector<double> values(samples);
  std::vector<char> failed(samples, 0);
  parallel_for(
      samples,
      [&](long i) {
        const std::uint64_t seed = derive_seed(config.seed, stream * 0x10001ULL + static_cast<std::uint64_t>(i));
        try {
          if (config.antithetic) {
            const double a = value_of(sampler.sample(seed, false));
            const double b = value_of(sampler.sample(seed, true));
            values[i] = 0.5 * (a + b);
          } else {
            values[i] = value_of(sampler.sample(seed, false));
          }
        } catch (const std::exception&) {
          failed[i] = 1;
        }
      },
      config.threads);
  PathValues out;
  out.value.reserve(samples);
  for (long i = 0; i < samples; ++i) {
    if (failed[i])
      ++out.failures;
    else
      out.value.push_back(values[i]);
  }
  return out;
}

Estimate summarize(double t, const PathValues& pv, const McConfig& config) {
  if (pv.value.empty()) throw std::runtime_error("mc_estimate: every path failed");
  const double fail_fraction = static_cast<double>(pv.failures) / (pv.failures + pv.value.size());
  if (fail_fraction > config.max_failure_fraction)
    throw std::runtime_error("mc_estimate: " + std::to_string(pv.failures) + " paths failed (fraction " +
                             std::to_string(fail_fraction) + ")");
  const long n = static_cast<long>(pv.value.size());
  const double mean = pairwise_sum(pv.value) / n;
  double var = 0.0;
  for (double v : pv.value) var += (v - mean) * (v - mean);
  var = n > 1 ? var / (n - 1) : 0.0;
  Estimate e;
  e.t = t;
  e.mean = mean;
  e.std_error = std::sqrt(var / n);
  e.paths = n * (config.antithetic ? 2 : 1);
  e.failures = pv.failures;
  return e;
}

}  // namespace

std::vector<Estimate> mc_estimate(const SdeSpec& spec, const McConfig& config) {
  spec.validate();
  if (config.paths < 1) throw std::invalid_argument("mc_estimate: need at least one path");
  for (double t : config.t_values)
    if (!(t > 0.0) || t > spec.horizon + 1e-12)
      throw std::invalid_argument("mc_estimate: t values must lie in (0, T]");

  std::vector<Estimate> out;
  out.reserve(config.t_values.size());
  for (std::size_t ti = 0; ti < config.t_values.size(); ++ti) {
    const double t = config.t_values[ti];
    const auto value_of = [&](const fbm::FbmPath& path) {
      solver::Trajectory traj;
      if (config.scheme == solver::Scheme::Rough) {
        traj = solver::solve_rough(spec, path, fbm::levy_area(path));
      } else {
        traj = solver::solve_young(spec, path, config.scheme);
      }
      return spec.f.eval(traj.states.col(path.grid.steps));
    };
    out.push_back(summarize(t, run_paths(spec, t, config, ti, value_of), config));
  }
  return out;
}

double fit_log_slope(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 2) throw std::invalid_argument("fit_log_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(t.size());
  for (int i = 0; i < n; ++i) {
    const double x = std::log(t[i]);
    const double v = std::log(y[i]);
    sx += x;
    sy += v;
    sxx += x * x;
    sxy += x * v;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

SlopeFit fit_from_points(std::vector<SlopePoint> points, double target) {
  std::vector<double> ts, ys;
  for (auto& p : points) {
    p.used = p.difference > 3.0 * p.mc_stderr && p.difference > 0.0;
    if (p.used) {
      ts.push_back(p.t);
      ys.push_back(p.difference);
    }
  }
  SlopeFit fit;
  fit.target = target;
  fit.points = std::move(points);
  if (ts.size() < 2) {
    fit.status = SlopeFit::Status::Inconclusive;
    return fit;
  }
  fit.slope = fit_log_slope(ts, ys);
  fit.status = SlopeFit::Status::Ok;
  return fit;
}

}  // namespace

SlopeFit remainder_slope(const SdeSpec& spec, int order, const std::vector<double>& t_grid, const McConfig& config,
                         const expansion::ExpandOptions& expand_options) {
  if (t_grid.size() < 2) throw std::invalid_argument("remainder_slope: need a t grid with >= 2 points");
  const expansion::Expansion exp = expansion::expand(spec, order, expand_options);

  McConfig cfg = config;
  cfg.t_values = t_grid;
  const std::vector<Estimate> estimates = mc_estimate(spec, cfg);

  std::vector<SlopePoint> points;
  points.reserve(t_grid.size());
  for (const auto& e : estimates) {
    SlopePoint p;
    p.t = e.t;
    p.mc_mean = e.mean;
    p.mc_stderr = e.std_error;
    p.reference = exp.evaluate(e.t);
    p.difference = std::abs(e.mean - p.reference);
    points.push_back(p);
  }
  return fit_from_points(std::move(points), (order + 1) * spec.hurst);
}

SlopeFit iterated_integral_remainder_slope(const MultiIndex& alpha, const sym::Expr& g, const SdeSpec& spec,
                                           const std::vector<double>& t_grid, const McConfig& config) {
  spec.validate();
  if (!(spec.hurst < 0.5))
    throw std::invalid_argument("iterated_integral_remainder_slope: intended for the 1/3 < H < 1/2 regime");
  const int r = alpha.length();
  const bool weight_is_one = g.is_constant() && g.value() == 1.0;

  std::vector<SlopePoint> points;
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    const double t = t_grid[ti];
    const auto value_of = [&](const fbm::FbmPath& path) {
      if (weight_is_one) return std::abs(sig::iterated_integral(path, alpha, 0, path.grid.steps));
      const solver::Trajectory traj = solver::solve_rough(spec, path, fbm::levy_area(path));
      Eigen::VectorXd weight(path.grid.steps + 1);
      for (int k = 0; k <= path.grid.steps; ++k) weight[k] = g.eval(traj.states.col(k));
      return std::abs(sig::weighted_iterated_integral(path, alpha, weight, 0, path.grid.steps));
    };
    McConfig cfg = config;
    cfg.antithetic = false;  // |.| breaks the pairing symmetry anyway
    const PathValues pv = run_paths(spec, t, cfg, 1000 + ti, value_of);
    const Estimate e = summarize(t, pv, cfg);
    SlopePoint p;
    p.t = t;
    p.mc_mean = e.mean;
    p.mc_stderr = e.std_error;
    p.reference = 0.0;
    p.difference = std::abs(e.mean);
    points.push_back(p);
  }
  return fit_from_points(std::move(points), r - alpha.weight() * (1.0 - spec.hurst));
}

}  // namespace fracdev::mc
