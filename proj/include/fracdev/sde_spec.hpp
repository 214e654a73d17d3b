#pragma once

#include <Eigen/Core>
#include <vector>

#include "fracdev/expr.hpp"
#include "fracdev/multi_index.hpp"

namespace fracdev {

/// dX = b(X) dt + sigma(X) dB on [0,T], X_0 = a, driven by a d-dimensional
/// fractional Brownian motion with Hurst index in (1/3,1); f is the test
/// function whose expectation gets expanded.
struct SdeSpec {
  int n = 1;  // state dimension
  int d = 1;  // noise dimension
  double hurst = 0.75;
  double horizon = 1.0;  // T
  Eigen::VectorXd initial;                     // a, size n
  std::vector<sym::Expr> drift;                // b^i, size n
  std::vector<std::vector<sym::Expr>> diffusion;  // sigma^{i,j}, n rows x d cols
  sym::Expr f;

  void validate() const;  // throws std::invalid_argument

  Eigen::VectorXd drift_at(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd diffusion_at(const Eigen::VectorXd& x) const;  // n x d
};

namespace sym {

/// First-order operator: j = 0 applies sum_k b^k d/dx_k, j in 1..d applies
/// sum_k sigma^{k,j} d/dx_k.
Expr apply_D(const SdeSpec& spec, const Expr& e, int j);

/// Composition along the word: letters are applied first-to-last, so the last
/// letter acts outermost. With this reading, summing the elementary
/// differentials of all trees sharing a label word reproduces the composed
/// operator (checked numerically in the tests).
Expr apply_D_alpha(const SdeSpec& spec, const Expr& e, const MultiIndex& alpha);

}  // namespace sym

}  // namespace fracdev
