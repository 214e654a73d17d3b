#include "fracdev/sde_spec.hpp"

#include <stdexcept>

namespace fracdev {

void SdeSpec::validate() const {
  if (n < 1 || d < 1) throw std::invalid_argument("SdeSpec: need n >= 1 and d >= 1");
  if (!(hurst > 1.0 / 3.0 && hurst < 1.0)) throw std::invalid_argument("SdeSpec: Hurst index must lie in (1/3,1)");
  if (!(horizon > 0.0)) throw std::invalid_argument("SdeSpec: horizon must be positive");
  if (initial.size() != n) throw std::invalid_argument("SdeSpec: initial point must have dimension n");
  if (static_cast<int>(drift.size()) != n) throw std::invalid_argument("SdeSpec: drift must have n components");
  if (static_cast<int>(diffusion.size()) != n) throw std::invalid_argument("SdeSpec: diffusion must have n rows");
  for (const auto& row : diffusion)
    if (static_cast<int>(row.size()) != d) throw std::invalid_argument("SdeSpec: diffusion rows must have d entries");
  auto check_vars = [&](const sym::Expr& e, const char* what) {
    if (e.max_variable() > n)
      throw std::invalid_argument(std::string("SdeSpec: ") + what + " uses a variable beyond x" + std::to_string(n));
  };
  check_vars(f, "f");
  for (const auto& e : drift) check_vars(e, "drift");
  for (const auto& row : diffusion)
    for (const auto& e : row) check_vars(e, "diffusion");
}

Eigen::VectorXd SdeSpec::drift_at(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = drift[i].eval(x);
  return out;
}

Eigen::MatrixXd SdeSpec::diffusion_at(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd out(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = diffusion[i][j].eval(x);
  return out;
}

namespace sym {

Expr apply_D(const SdeSpec& spec, const Expr& e, int j) {
  if (j < 0 || j > spec.d) throw std::invalid_argument("apply_D: j must lie in 0..d");
  Expr out;
  for (int k = 1; k <= spec.n; ++k) {
    const Expr coeff = j == 0 ? spec.drift[k - 1] : spec.diffusion[k - 1][j - 1];
    out = out + coeff * differentiate(e, k);
  }
  return out;
}

Expr apply_D_alpha(const SdeSpec& spec, const Expr& e, const MultiIndex& alpha) {
  Expr out = e;
  for (int letter : alpha.word) out = apply_D(spec, out, letter);
  return out;
}

}  // namespace sym

}  // namespace fracdev
