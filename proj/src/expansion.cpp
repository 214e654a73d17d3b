#include "fracdev/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace fracdev::expansion {

double Expansion::evaluate(double t) const {
  // Kahan-compensated accumulation over the aggregated polynomial.
  double sum = 0.0, comp = 0.0;
  for (const auto& a : aggregates) {
    const double term = a.coefficient * std::pow(t, a.exponent);
    const double y = term - comp;
    const double next = sum + y;
    comp = (next - sum) - y;
    sum = next;
  }
  return sum;
}

namespace {

class MomentTable {
 public:
  MomentTable(double hurst, const ExpandOptions& options) : hurst_(hurst), options_(options) {}

  std::pair<double, double> moment(const MultiIndex& alpha) {
    const MultiIndex key = alpha.canonical_relabelled();
    const std::string ks = key.str();
    auto it = cache_.find(ks);
    if (it != cache_.end()) return it->second;
    std::pair<double, double> out;
    if (hurst_ > 0.5) {
      const auto r = moments::expected_iterated_integral(key, hurst_, options_.moment_options);
      out = {r.value, r.error_estimate};
    } else {
      // Parity still gives exact zeros below the pairing regime.
      bool odd = false;
      for (int letter = 1; letter <= 64 && !odd; ++letter) {
        const auto pos = key.positions_of(letter);
        if (pos.empty()) break;
        odd = pos.size() % 2 != 0;
      }
      if (odd || key.weight() % 2 != 0) {
        out = {0.0, 0.0};
      } else if (key.all_zero()) {
        double f = 1.0;
        for (int i = 2; i <= key.length(); ++i) f *= i;
        out = {1.0 / f, 0.0};
      } else {
        const auto est = moments::mc_expected_iterated_integral(key, hurst_, options_.mc_paths, options_.mc_steps,
                                                                options_.mc_seed);
        out = {est.mean, est.std_error};
      }
    }
    cache_.emplace(ks, out);
    return out;
  }

 private:
  double hurst_;
  const ExpandOptions& options_;
  std::map<std::string, std::pair<double, double>> cache_;
};

}  // namespace

Expansion expand(const SdeSpec& spec, int order, const ExpandOptions& options) {
  spec.validate();
  if (order < 0) throw std::invalid_argument("expand: order must be >= 0");

  Expansion out;
  out.order = order;
  out.hurst = spec.hurst;
  out.remainder_order = (order + 1) * spec.hurst;
  out.f_at_a = spec.f.eval(spec.initial);

  ElementaryEvaluator elementary(spec, spec.initial);
  MomentTable moments_table(spec.hurst, options);

  // Structural zeros that do not depend on the index assignment: an
  // identically-zero drift annihilates every tree with a deterministic node,
  // and a constant diffusion annihilates every stochastic node with children.
  bool drift_zero = true;
  for (const auto& e : spec.drift) drift_zero = drift_zero && e.is_zero();
  bool diffusion_const = true;
  for (const auto& row : spec.diffusion)
    for (const auto& e : row) diffusion_const = diffusion_const && e.is_constant();

  std::map<long long, Expansion::Aggregate> aggregates;  // key = round(exponent / 1e-12)
  const auto add_aggregate = [&](double exponent, double coeff, double err) {
    const long long key = static_cast<long long>(std::llround(exponent * 1e12));
    auto& slot = aggregates[key];
    slot.exponent = exponent;
    slot.coefficient += coeff;
    slot.error += std::abs(err);
  };

  trees::EnumerationLimits limits{options.tree_cap};
  long tree_id = 0;
  trees::for_each_tree(order + 1, [&](const trees::LabelledTree& tree) {
    ++tree_id;
    ++out.trees_total;
    const int s = tree.stochastic_count();
    const int det = tree.deterministic_count();
    const double rho = spec.hurst * s + det;
    const bool odd = s % 2 != 0;

    bool structurally_zero = drift_zero && det > 0;
    if (!structurally_zero && diffusion_const) {
      for (int node = 2; node <= tree.node_count() && !structurally_zero; ++node)
        structurally_zero = tree.label(node).kind == trees::NodeKind::Stochastic && tree.child_count(node) > 0;
    }

    trees::AssignmentRange assignments(s, spec.d);
    trees::IndexAssignment assignment;
    while (assignments.next(assignment)) {
      ++out.terms_total;
      if (odd) ++out.pruned_odd_stochastic;

      const double coeff = structurally_zero ? 0.0 : elementary.value(tree, assignment);
      double moment = 0.0, moment_err = 0.0;
      if (coeff == 0.0) {
        ++out.pruned_zero_coefficient;
      } else if (!odd) {
        const auto [m, me] = moments_table.moment(trees::label_word(tree, assignment));
        moment = m;
        moment_err = me;
      }
      if (coeff != 0.0 && moment != 0.0) add_aggregate(rho, coeff * moment, coeff * moment_err);

      const bool record_zero = !(coeff == 0.0 || moment == 0.0);
      if ((record_zero || !options.prune_zero) && out.terms.size() < options.max_recorded_terms) {
        Term term;
        term.tree_id = tree_id;
        term.bracket = trees::bracket_string(tree);
        term.assignment = assignment;
        term.coefficient = coeff;
        term.moment = moment;
        term.moment_error = moment_err;
        term.exponent = rho;
        term.stochastic = s;
        term.deterministic = det;
        out.terms.push_back(std::move(term));
      }
    }
  }, limits);

  out.aggregates.reserve(aggregates.size());
  for (auto& [key, agg] : aggregates)
    if (agg.coefficient != 0.0 || agg.error != 0.0) out.aggregates.push_back(agg);
  std::sort(out.aggregates.begin(), out.aggregates.end(),
            [](const auto& a, const auto& b) { return a.exponent < b.exponent; });
  return out;
}

std::string report_text(const Expansion& e) {
  std::ostringstream os;
  os << "order m = " << e.order << ", H = " << e.hurst << ", remainder O(t^" << e.remainder_order << ")\n";
  os << "trees: " << e.trees_total << ", terms: " << e.terms_total
     << " (odd-s pruned: " << e.pruned_odd_stochastic << ", zero coefficient: " << e.pruned_zero_coefficient
     << ")\n";
  os << "P_t f(a) ~";
  bool first = true;
  for (const auto& a : e.aggregates) {
    os << (first ? " " : " + ") << a.coefficient << "*t^" << a.exponent;
    first = false;
  }
  if (first) os << " 0";
  os << "\n\nper-term table (bracket | j's | F | E(I) | rho):\n";
  for (const auto& t : e.terms) {
    os << "  " << t.bracket << " | (";
    for (std::size_t i = 0; i < t.assignment.size(); ++i) os << (i ? "," : "") << t.assignment[i];
    os << ") | " << t.coefficient << " | " << t.moment;
    if (t.moment_error > 0.0) os << "±" << t.moment_error;
    os << " | " << t.exponent << "\n";
  }
  return os.str();
}

}  // namespace fracdev::expansion
