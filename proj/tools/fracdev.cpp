// fracdev: small-time expansions of E f(X_t) for SDEs driven by fractional
// Brownian motion, with Monte Carlo validation utilities.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "fracdev/expansion.hpp"
#include "fracdev/iterated_moments.hpp"
#include "fracdev/labelled_tree.hpp"
#include "fracdev/monte_carlo.hpp"
#include "fracdev/spec_io.hpp"
#include "fracdev/suite.hpp"

using nlohmann::json;
using namespace fracdev;

namespace {

struct GlobalOptions {
  std::string format = "json";  // json, text, csv
  std::string out;
  int threads = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void emit(const GlobalOptions& g, const std::string& payload) {
  if (g.out.empty()) {
    std::cout << payload << "\n";
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw std::invalid_argument("cannot open output file '" + g.out + "'");
  f << payload << "\n";
}

std::string full_precision(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void warn_unbounded(const SdeSpec& spec) {
  bool bounded = sym::bounded_heuristic(spec.f);
  for (const auto& e : spec.drift) bounded = bounded && sym::bounded_heuristic(e);
  for (const auto& row : spec.diffusion)
    for (const auto& e : row) bounded = bounded && sym::bounded_heuristic(e);
  if (!bounded)
    std::cerr << "note: coefficients contain unbounded primitives; the expansion theory assumes bounded "
                 "smooth coefficients\n";
}

int cmd_trees(const GlobalOptions& g, int max_nodes, int noise_dim, bool strato_only, int cap) {
  trees::EnumerationLimits limits;
  if (cap > 0) limits.node_cap = cap;
  const auto list = trees::enumerate_lts(max_nodes, limits);
  json records = json::array();
  std::string text;
  long id = 0;
  for (const auto& t : list) {
    ++id;
    if (strato_only && !trees::is_stratonovich_class(t)) continue;
    const auto word = trees::label_word_template(t);
    json rec{{"id", id},
             {"l", t.node_count()},
             {"d", t.deterministic_count()},
             {"s", t.stochastic_count()},
             {"bracket", trees::bracket_string(t)},
             {"label_word_template", word}};
    if (noise_dim > 0) {
      long long assignments = 1;
      for (int i = 0; i < t.stochastic_count(); ++i) assignments *= noise_dim;
      rec["assignments"] = assignments;
    }
    records.push_back(rec);
    text += std::to_string(id) + "  l=" + std::to_string(t.node_count()) + " d=" +
            std::to_string(t.deterministic_count()) + " s=" + std::to_string(t.stochastic_count()) + "  " +
            trees::bracket_string(t) + "\n";
  }
  emit(g, g.format == "text" ? text : records.dump(2));
  return 0;
}

int cmd_moment(const GlobalOptions& g, const std::string& alpha_text, double hurst, const std::string& method,
               double tol, long mc_paths, int mc_steps) {
  const MultiIndex alpha = MultiIndex::parse(alpha_text);
  json out;
  if (method == "pairing") {
    moments::MomentOptions options;
    options.mc_seed = g.seed_set ? g.seed : options.mc_seed;
    const auto r = moments::expected_iterated_integral(alpha, hurst, options);
    const char* name = r.method == moments::MomentResult::Method::ExactClosedForm ? "exact-closed-form"
                       : r.method == moments::MomentResult::Method::Quadrature    ? "quadrature"
                                                                                  : "monte-carlo";
    out = {{"alpha", alpha.str()},
           {"hurst", hurst},
           {"value", r.value},
           {"error_estimate", r.error_estimate},
           {"method", name},
           {"matchings", r.matchings}};
    if (r.error_estimate > tol)
      out["warning"] = "error estimate above the requested tolerance";
  } else if (method == "mc") {
    const auto r = moments::mc_expected_iterated_integral(alpha, hurst, mc_paths, mc_steps,
                                                          g.seed_set ? g.seed : 0x5eedULL);
    out = {{"alpha", alpha.str()}, {"hurst", hurst},           {"value", r.mean},
           {"error_estimate", r.std_error}, {"method", "monte-carlo"}, {"paths", r.paths}};
  } else {
    throw CLI::ValidationError("--method must be pairing or mc");
  }
  emit(g, g.format == "text" ? out.dump(2) : out.dump(2));
  return 0;
}

int cmd_expand(const GlobalOptions& g, const std::string& spec_path, int order, bool prune_zero, int cap) {
  io::SpecDocument doc = io::load_spec(spec_path);
  warn_unbounded(doc.spec);
  if (order >= 0) doc.expansion_order = order;
  expansion::ExpandOptions options;
  options.prune_zero = prune_zero;
  if (cap > 0) options.tree_cap = cap;
  if (g.seed_set) options.mc_seed = g.seed;
  const auto e = expansion::expand(doc.spec, doc.expansion_order, options);
  emit(g, g.format == "text" ? expansion::report_text(e) : io::expansion_to_json(e).dump(2));
  return 0;
}

int cmd_simulate(const GlobalOptions& g, double hurst, int steps, int dim, std::uint64_t seed, double horizon) {
  const auto path = fbm::sample_path(hurst, Grid(horizon, steps), dim, seed);
  std::string csv = "time";
  for (int c = 1; c <= dim; ++c) csv += ",B" + std::to_string(c);
  csv += "\n";
  for (int k = 0; k <= steps; ++k) {
    csv += full_precision(path.grid.time(k));
    for (int c = 0; c < dim; ++c) csv += "," + full_precision(path.values(c, k));
    csv += "\n";
  }
  emit(g, csv);
  return 0;
}

int cmd_solve(const GlobalOptions& g, const std::string& spec_path, int steps, std::uint64_t seed,
              const std::string& scheme_name) {
  io::SpecDocument doc = io::load_spec(spec_path);
  warn_unbounded(doc.spec);
  const auto scheme = solver::scheme_from_string(scheme_name);
  const auto path = fbm::sample_path(doc.spec.hurst, Grid(doc.spec.horizon, steps), doc.spec.d, seed);
  solver::Trajectory traj;
  if (scheme == solver::Scheme::Rough) {
    traj = solver::solve_rough(doc.spec, path, fbm::levy_area(path));
  } else {
    traj = solver::solve_young(doc.spec, path, scheme);
  }
  std::string csv = "time";
  for (int i = 1; i <= doc.spec.n; ++i) csv += ",X" + std::to_string(i);
  csv += "\n";
  for (int k = 0; k <= steps; ++k) {
    csv += full_precision(traj.grid.time(k));
    for (int i = 0; i < doc.spec.n; ++i) csv += "," + full_precision(traj.states(i, k));
    csv += "\n";
  }
  emit(g, csv);
  return 0;
}

int cmd_validate(const GlobalOptions& g, const std::string& spec_path, int order, std::vector<double> t_grid,
                 long paths, int steps) {
  io::SpecDocument doc = io::load_spec(spec_path);
  warn_unbounded(doc.spec);
  if (order >= 0) doc.expansion_order = order;
  mc::McConfig cfg = doc.mc;
  cfg.threads = g.threads;
  if (g.seed_set) cfg.seed = g.seed;
  if (paths > 0) cfg.paths = paths;
  if (steps > 0) cfg.steps = steps;
  if (t_grid.empty()) t_grid = {0.4, 0.3, 0.2, 0.15, 0.1};
  for (double& t : t_grid) t = std::min(t, doc.spec.horizon);

  const auto fit = mc::remainder_slope(doc.spec, doc.expansion_order, t_grid, cfg);
  json out = io::slope_to_json(fit);
  out["order"] = doc.expansion_order;

  // partial-sum stabilization: the expansion value at each order up to m
  json partials = json::array();
  for (int m = 0; m <= doc.expansion_order; ++m) {
    const auto e = expansion::expand(doc.spec, m);
    json row{{"order", m}};
    json values = json::array();
    for (double t : t_grid) values.push_back({{"t", t}, {"value", e.evaluate(t)}});
    row["values"] = values;
    partials.push_back(row);
  }
  out["partial_sums"] = partials;
  emit(g, out.dump(2));
  return fit.status == mc::SlopeFit::Status::Ok || !fit.points.empty() ? 0 : 1;
}

int cmd_suite(const GlobalOptions& g, const std::string& config_path, std::vector<std::string> criteria,
              double paths_scale) {
  suite::SuiteConfig cfg;
  cfg.threads = g.threads;
  if (g.seed_set) cfg.seed = g.seed;
  cfg.paths_scale = paths_scale;
  cfg.criteria = std::move(criteria);
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot open suite config '" + config_path + "'");
    json j;
    in >> j;
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      if (key == "criteria") cfg.criteria = it.value().get<std::vector<std::string>>();
      else if (key == "paths_scale") cfg.paths_scale = it.value().get<double>();
      else if (key == "seed") cfg.seed = it.value().get<std::uint64_t>();
      else if (key == "threads") cfg.threads = it.value().get<int>();
      else if (key == "moment_bias") cfg.moment_bias = it.value().get<double>();
      else throw std::invalid_argument("suite config: unknown key '" + key + "'");
    }
  }
  for (const auto& name : cfg.criteria) {
    const auto& known = suite::criterion_names();
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw std::invalid_argument("unknown criterion '" + name + "'");
  }
  const auto report = suite::run_suite(cfg);
  emit(g, g.format == "text" ? report.to_text() : report.to_json().dump(2));
  return report.all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"small-time expansions for fractional SDEs"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOptions g;
  app.add_option("--format", g.format, "output format: json, text or csv")->check(CLI::IsMember({"json", "text", "csv"}));
  app.add_option("--out", g.out, "write output to a file instead of stdout");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
  auto* seed_opt = app.add_option("--seed", g.seed, "master seed override");

  // trees
  auto* trees_cmd = app.add_subcommand("trees", "enumerate labelled stochastic trees");
  int max_nodes = 3, noise_dim = 0, tree_cap = 0;
  bool strato_only = false;
  trees_cmd->add_option("--max-nodes", max_nodes, "largest node count")->required();
  trees_cmd->add_option("--noise-dim", noise_dim, "report the number of index assignments for this d");
  trees_cmd->add_flag("--strato-only", strato_only, "only trees with an even number of stochastic nodes");
  trees_cmd->add_option("--cap", tree_cap, "override the enumeration cap");

  // moment
  auto* moment_cmd = app.add_subcommand("moment", "expected iterated integral of a word");
  std::string alpha_text, moment_method = "pairing";
  double moment_hurst = 0.75, moment_tol = 1e-6;
  long moment_paths = 100000;
  int moment_steps = 512;
  moment_cmd->add_option("--alpha", alpha_text, "comma-separated word, e.g. 1,0,1")->required();
  moment_cmd->add_option("--hurst", moment_hurst, "Hurst index")->required();
  moment_cmd->add_option("--method", moment_method, "pairing or mc");
  moment_cmd->add_option("--tol", moment_tol, "tolerance used for the warning field");
  moment_cmd->add_option("--paths", moment_paths, "paths for --method mc");
  moment_cmd->add_option("--steps", moment_steps, "grid steps for --method mc");

  // expand
  auto* expand_cmd = app.add_subcommand("expand", "tree expansion of P_t f(a) from a spec file");
  std::string expand_spec;
  int expand_order = -1, expand_cap = 0;
  bool prune_zero = false;
  expand_cmd->add_option("spec", expand_spec, "JSON spec file")->required();
  expand_cmd->add_option("--order", expand_order, "expansion order m");
  expand_cmd->add_flag("--prune-zero", prune_zero, "drop zero rows from the term table");
  expand_cmd->add_option("--cap", expand_cap, "override the tree enumeration cap");

  // simulate-path
  auto* sim_cmd = app.add_subcommand("simulate-path", "sample a fractional Brownian path as CSV");
  double sim_hurst = 0.75, sim_horizon = 1.0;
  int sim_steps = 256, sim_dim = 1;
  std::uint64_t sim_seed = 1;
  sim_cmd->add_option("--hurst", sim_hurst)->required();
  sim_cmd->add_option("--steps", sim_steps)->required();
  sim_cmd->add_option("--dim", sim_dim, "number of components");
  sim_cmd->add_option("--seed", sim_seed, "seed for this path");
  sim_cmd->add_option("--horizon", sim_horizon, "time horizon T");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve the SDE along one sampled path");
  std::string solve_spec, solve_scheme = "heun";
  int solve_steps = 256;
  std::uint64_t solve_seed = 1;
  solve_cmd->add_option("spec", solve_spec, "JSON spec file")->required();
  solve_cmd->add_option("--steps", solve_steps);
  solve_cmd->add_option("--seed", solve_seed, "seed for this path");
  solve_cmd->add_option("--scheme", solve_scheme, "euler, heun or rough");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Monte Carlo remainder-decay validation");
  std::string validate_spec;
  int validate_order = -1, validate_steps = 0;
  long validate_paths = 0;
  std::vector<double> validate_ts;
  validate_cmd->add_option("spec", validate_spec, "JSON spec file")->required();
  validate_cmd->add_option("--order", validate_order, "expansion order m");
  validate_cmd->add_option("--t-grid", validate_ts, "geometric grid of evaluation times");
  validate_cmd->add_option("--paths", validate_paths, "override Monte Carlo paths");
  validate_cmd->add_option("--steps", validate_steps, "override grid steps");

  // suite
  auto* suite_cmd = app.add_subcommand("suite", "run the acceptance criteria");
  std::string suite_config;
  std::vector<std::string> suite_criteria;
  double suite_scale = 1.0;
  suite_cmd->add_option("--config", suite_config, "JSON suite configuration");
  suite_cmd->add_option("--criteria", suite_criteria, "subset of criteria to run");
  suite_cmd->add_option("--paths-scale", suite_scale, "scale Monte Carlo path counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  g.seed_set = seed_opt->count() > 0;

  try {
    if (*trees_cmd) return cmd_trees(g, max_nodes, noise_dim, strato_only, tree_cap);
    if (*moment_cmd) return cmd_moment(g, alpha_text, moment_hurst, moment_method, moment_tol, moment_paths, moment_steps);
    if (*expand_cmd) return cmd_expand(g, expand_spec, expand_order, prune_zero, expand_cap);
    if (*sim_cmd) return cmd_simulate(g, sim_hurst, sim_steps, sim_dim, sim_seed, sim_horizon);
    if (*solve_cmd) return cmd_solve(g, solve_spec, solve_steps, solve_seed, solve_scheme);
    if (*validate_cmd) return cmd_validate(g, validate_spec, validate_order, validate_ts, validate_paths, validate_steps);
    if (*suite_cmd) return cmd_suite(g, suite_config, suite_criteria, suite_scale);
  } catch (const std::invalid_argument& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const std::length_error& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 2;
}
