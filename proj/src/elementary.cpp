#include "fracdev/elementary.hpp"

#include <algorithm>
#include <stdexcept>

namespace fracdev::expansion {

namespace {

// Iterates over all tuples (J_1..J_k) in {1..n}^k.
struct TupleRange {
  int k, n;
  std::vector<int> current;
  bool next() {
    if (current.empty()) {
      current.assign(k, 1);
      return k >= 0;
    }
    for (int i = k - 1; i >= 0; --i) {
      if (current[i] < n) {
        ++current[i];
        std::fill(current.begin() + i + 1, current.end(), 1);
        return true;
      }
    }
    return false;
  }
};

}  // namespace

ElementaryEvaluator::ElementaryEvaluator(const SdeSpec& spec, const Eigen::VectorXd& point)
    : spec_(spec), point_(point) {
  if (point_.size() != spec_.n) throw std::invalid_argument("ElementaryEvaluator: point must have dimension n");
}

const sym::Expr& ElementaryEvaluator::base_expr(int fn) const {
  if (fn == 0) return spec_.f;
  const int idx = fn - 1;
  if (idx < spec_.n) return spec_.drift[idx];
  const int rest = idx - spec_.n;
  return spec_.diffusion[rest % spec_.n][rest / spec_.n];
}

double ElementaryEvaluator::partial(int fn, std::vector<int> vars) {
  std::sort(vars.begin(), vars.end());
  const auto key = std::make_pair(fn, vars);
  auto it = values_.find(key);
  if (it != values_.end()) return it->second;

  sym::Expr expr;
  if (vars.empty()) {
    expr = base_expr(fn);
  } else {
    auto parent_vars = vars;
    const int last = parent_vars.back();
    parent_vars.pop_back();
    const auto parent_key = std::make_pair(fn, parent_vars);
    auto pit = exprs_.find(parent_key);
    if (pit == exprs_.end()) {
      partial(fn, parent_vars);  // fills exprs_
      pit = exprs_.find(parent_key);
    }
    expr = sym::differentiate(pit->second, last);
  }
  exprs_.emplace(key, expr);
  const double v = expr.is_zero() ? 0.0 : expr.eval(point_);
  values_.emplace(key, v);
  return v;
}

Eigen::VectorXd ElementaryEvaluator::node_value(const trees::LabelledTree& tree, int node,
                                                const trees::IndexAssignment& assignment, bool* zero) {
  const auto kids = tree.children(node);
  const trees::NodeLabel& lab = tree.label(node);
  const int out_dim = node == 1 ? 1 : spec_.n;

  int fn_base = 0;
  if (lab.kind == trees::NodeKind::Deterministic) fn_base = 1;
  if (lab.kind == trees::NodeKind::Stochastic) {
    const int j = assignment.at(lab.slot - 1);
    if (j < 1 || j > spec_.d) throw std::invalid_argument("elementary_differential: assignment outside 1..d");
    fn_base = 1 + spec_.n * j;
  }
  // Component I uses fn id: root -> 0; drift -> fn_base + I; diffusion column j -> fn_base + I.
  auto fn_of = [&](int component) { return lab.kind == trees::NodeKind::Root ? 0 : fn_base + component; };

  Eigen::VectorXd out = Eigen::VectorXd::Zero(out_dim);
  const int k = static_cast<int>(kids.size());
  if (k == 0) {
    for (int i = 0; i < out_dim; ++i) out[i] = partial(fn_of(i), {});
    *zero = out.isZero(0.0);
    return out;
  }

  std::vector<Eigen::VectorXd> child_values(k);
  for (int c = 0; c < k; ++c) {
    bool child_zero = false;
    child_values[c] = node_value(tree, kids[c], assignment, &child_zero);
    if (child_zero) {  // a zero child annihilates the whole multilinear form
      *zero = true;
      return out;
    }
  }

  TupleRange tuples{k, spec_.n, {}};
  while (tuples.next()) {
    double prod = 1.0;
    for (int c = 0; c < k; ++c) prod *= child_values[c][tuples.current[c] - 1];
    if (prod == 0.0) continue;
    for (int i = 0; i < out_dim; ++i) {
      const double der = partial(fn_of(i), tuples.current);
      if (der != 0.0) out[i] += der * prod;
    }
  }
  *zero = out.isZero(0.0);
  return out;
}

double ElementaryEvaluator::value(const trees::LabelledTree& tree, const trees::IndexAssignment& assignment) {
  if (static_cast<int>(assignment.size()) != tree.stochastic_count())
    throw std::invalid_argument("elementary_differential: assignment must match s(t)");
  bool zero = false;
  try {
    return node_value(tree, 1, assignment, &zero)[0];
  } catch (const sym::EvalError& err) {
    throw sym::EvalError(std::string(err.what()) + " while evaluating tree " + trees::bracket_string(tree));
  }
}

double elementary_differential(const SdeSpec& spec, const trees::LabelledTree& tree,
                               const trees::IndexAssignment& assignment, const Eigen::VectorXd& point) {
  ElementaryEvaluator eval(spec, point);
  return eval.value(tree, assignment);
}

}  // namespace fracdev::expansion
