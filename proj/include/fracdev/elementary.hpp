#pragma once

#include <Eigen/Core>
#include <map>
#include <vector>

#include "fracdev/labelled_tree.hpp"
#include "fracdev/sde_spec.hpp"

namespace fracdev::expansion {

/// Evaluates elementary differentials F(t)(a): the root applies derivatives
/// of f, deterministic nodes derivatives of the drift, stochastic nodes
/// derivatives of the assigned diffusion column, each as a symmetric k-linear
/// form over the children's values. Derivative expressions and their values
/// at `a` are memoized, so one evaluator can be reused across many trees.
class ElementaryEvaluator {
 public:
  ElementaryEvaluator(const SdeSpec& spec, const Eigen::VectorXd& point);

  /// F(t)(a) for the given slot assignment (components 1..d per slot).
  double value(const trees::LabelledTree& tree, const trees::IndexAssignment& assignment);

 private:
  // fn encoding: 0 -> f, 1..n -> b^i, n*(j)+i -> sigma^{i,j}
  double partial(int fn, std::vector<int> vars);
  const sym::Expr& base_expr(int fn) const;

  const SdeSpec& spec_;
  Eigen::VectorXd point_;
  std::map<std::pair<int, std::vector<int>>, double> values_;
  std::map<std::pair<int, std::vector<int>>, sym::Expr> exprs_;

  Eigen::VectorXd node_value(const trees::LabelledTree& tree, int node, const trees::IndexAssignment& assignment,
                             bool* zero);
};

double elementary_differential(const SdeSpec& spec, const trees::LabelledTree& tree,
                               const trees::IndexAssignment& assignment, const Eigen::VectorXd& point);

}  // namespace fracdev::expansion
