#include "fracdev/rough.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracdev/rng.hpp"

namespace fracdev::rough {

Increment2 delta(const GridFunction& g) {
  const int n = g.grid.points();
  Increment2 out{g.grid, Eigen::MatrixXd::Zero(n, n)};
  for (int s = 0; s < n; ++s)
    for (int t = s; t < n; ++t) out.h(s, t) = g.values[t] - g.values[s];
  return out;
}

Increment3 delta(const Increment2& h) {
  Eigen::MatrixXd copy = h.h;
  return Increment3{h.grid, [copy](int s, int u, int t) { return copy(s, t) - copy(s, u) - copy(u, t); }};
}

double holder_seminorm(const Increment2& h, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("holder_seminorm: mu must be positive");
  const int n = h.grid.points();
  const double dt = h.grid.dt();
  double sup = 0.0;
  for (int s = 0; s < n; ++s)
    for (int t = s + 1; t < n; ++t) sup = std::max(sup, std::abs(h(s, t)) / std::pow((t - s) * dt, mu));
  return sup;
}

double holder_seminorm(const Increment3& h, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("holder_seminorm: mu must be positive");
  const int n = h.grid.points();
  const double dt = h.grid.dt();
  double sup = 0.0;
  for (int s = 0; s < n; ++s)
    for (int u = s + 1; u < n; ++u)
      for (int t = u + 1; t < n; ++t) sup = std::max(sup, std::abs(h(s, u, t)) / std::pow((t - s) * dt, mu));
  return sup;
}

double closedness_defect(const Increment3& h, int max_samples) {
  const int n = h.grid.points();
  double defect = 0.0;
  auto probe = [&](int s, int u, int v, int t) {
    // (delta h)_{suvt} = h_{uvt} - h_{svt} + h_{sut} - h_{suv}
    const double d = h(u, v, t) - h(s, v, t) + h(s, u, t) - h(s, u, v);
    defect = std::max(defect, std::abs(d));
  };
  const long total = static_cast<long>(n) * n * n * n;
  if (total <= max_samples) {
    for (int s = 0; s < n; ++s)
      for (int u = s + 1; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
          for (int t = v + 1; t < n; ++t) probe(s, u, v, t);
    return defect;
  }
  SplitMix64 rng(0xc105ed);
  for (int i = 0; i < max_samples; ++i) {
    int idx[4];
    for (int& v : idx) v = static_cast<int>(rng.next() % n);
    std::sort(idx, idx + 4);
    if (idx[0] == idx[1] || idx[1] == idx[2] || idx[2] == idx[3]) continue;
    probe(idx[0], idx[1], idx[2], idx[3]);
  }
  return defect;
}

GridFunction riemann_primitive(const Increment2& g) {
  const int n = g.grid.points();
  GridFunction f{g.grid, Eigen::VectorXd::Zero(n)};
  for (int k = 1; k < n; ++k) f.values[k] = f.values[k - 1] + g(k - 1, k);
  return f;
}

Increment2 sew(const Increment3& h, double closedness_tol) {
  const double defect = closedness_defect(h);
  if (defect > closedness_tol)
    throw std::invalid_argument("sew: input is not closed (max |delta h| = " + std::to_string(defect) + ")");
  const int n = h.grid.points();
  // Preimage g0_st = -h(t0, s, t); subtracting the primitive's increments
  // leaves the unique preimage vanishing on adjacent pairs.
  Increment2 g0{h.grid, Eigen::MatrixXd::Zero(n, n)};
  for (int s = 0; s < n; ++s)
    for (int t = s + 1; t < n; ++t) g0.h(s, t) = -h(0, s, t);
  const GridFunction f = riemann_primitive(g0);
  Increment2 out{h.grid, Eigen::MatrixXd::Zero(n, n)};
  for (int s = 0; s < n; ++s)
    for (int t = s + 1; t < n; ++t) out.h(s, t) = g0(s, t) - (f.values[t] - f.values[s]);
  return out;
}

Eigen::VectorXd ControlledPath::remainder(const fbm::FbmPath& x, int s, int t) const {
  return (values.col(t) - values.col(s)) - zeta[s] * (x.values.col(t) - x.values.col(s));
}

double compensated_integral(const ControlledRow& m, const fbm::FbmPath& x, const fbm::AreaProcess& area, int k0,
                            int k1) {
  if (area.coarse.steps != x.grid.steps)
    throw std::invalid_argument("compensated_integral: area resolution must match the path grid");
  if (k0 < 0 || k1 > x.grid.steps || k0 > k1) throw std::invalid_argument("compensated_integral: bad window");
  double acc = 0.0;
  for (int k = k0; k < k1; ++k) {
    const Eigen::VectorXd dx = x.increment(k);
    acc += m.values.col(k).dot(dx);
    acc += m.slope[k].cwiseProduct(area.blocks[k]).sum();
  }
  return acc;
}

double young_integral(const Eigen::VectorXd& integrand, const Eigen::VectorXd& integrator, int k0, int k1) {
  if (integrand.size() != integrator.size()) throw std::invalid_argument("young_integral: size mismatch");
  if (k0 < 0 || k1 >= integrand.size() || k0 > k1) throw std::invalid_argument("young_integral: bad window");
  double acc = 0.0;
  for (int k = k0; k < k1; ++k) acc += integrand[k] * (integrator[k + 1] - integrator[k]);
  return acc;
}

ControlledPath compose_controlled(const std::vector<sym::Expr>& phi, const ControlledPath& z) {
  const int p = static_cast<int>(phi.size());
  const int k = static_cast<int>(z.values.rows());
  const int n = z.grid.points();
  const int d = z.zeta.empty() ? 0 : static_cast<int>(z.zeta[0].cols());
  ControlledPath out;
  out.grid = z.grid;
  out.values.resize(p, n);
  out.zeta.assign(n, Eigen::MatrixXd::Zero(p, d));

  std::vector<std::vector<sym::Expr>> grad(p);
  for (int i = 0; i < p; ++i) {
    grad[i].reserve(k);
    for (int j = 1; j <= k; ++j) grad[i].push_back(sym::differentiate(phi[i], j));
  }
  Eigen::MatrixXd jac(p, k);
  for (int c = 0; c < n; ++c) {
    const Eigen::VectorXd state = z.values.col(c);
    for (int i = 0; i < p; ++i) {
      out.values(i, c) = phi[i].eval(state);
      for (int j = 0; j < k; ++j) jac(i, j) = grad[i][j].eval(state);
    }
    out.zeta[c] = jac * z.zeta[c];
  }
  return out;
}

ControlledPath integrate_controlled(const std::vector<ControlledRow>& m, const fbm::FbmPath& x,
                                    const fbm::AreaProcess& area, const Eigen::VectorXd& z0) {
  const int k = static_cast<int>(m.size());
  if (z0.size() != k) throw std::invalid_argument("integrate_controlled: initial value size mismatch");
  const int n = x.grid.points();
  ControlledPath z;
  z.grid = x.grid;
  z.values.resize(k, n);
  z.values.col(0) = z0;
  z.zeta.assign(n, Eigen::MatrixXd::Zero(k, x.dim));
  for (int c = 0; c < n; ++c)
    for (int i = 0; i < k; ++i) z.zeta[c].row(i) = m[i].values.col(c).transpose();
  for (int c = 0; c < n - 1; ++c) {
    const Eigen::VectorXd dx = x.increment(c);
    for (int i = 0; i < k; ++i) {
      const double step = m[i].values.col(c).dot(dx) + m[i].slope[c].cwiseProduct(area.blocks[c]).sum();
      z.values(i, c + 1) = z.values(i, c) + step;
    }
  }
  return z;
}

double ito_residual(const sym::Expr& f, const ControlledPath& z, const std::vector<ControlledRow>& m,
                    const fbm::FbmPath& x, const fbm::AreaProcess& area) {
  const int k = static_cast<int>(m.size());
  const int d = x.dim;
  const int n = x.grid.points();

  std::vector<sym::Expr> grad;
  std::vector<std::vector<sym::Expr>> hess(k);
  for (int i = 1; i <= k; ++i) grad.push_back(sym::differentiate(f, i));
  for (int i = 0; i < k; ++i)
    for (int j = 1; j <= k; ++j) hess[i].push_back(sym::differentiate(grad[i], j));

  // w = (grad f(z))^T m as a controlled row; slope from the product rule.
  ControlledRow w;
  w.grid = x.grid;
  w.values.resize(d, n);
  w.slope.assign(n, Eigen::MatrixXd::Zero(d, d));
  for (int c = 0; c < n; ++c) {
    const Eigen::VectorXd state = z.values.col(c);
    Eigen::VectorXd g(k);
    for (int i = 0; i < k; ++i) g[i] = grad[i].eval(state);
    Eigen::VectorXd row = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < k; ++i) row += g[i] * m[i].values.col(c);
    w.values.col(c) = row;

    Eigen::MatrixXd slope = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < k; ++i) slope += g[i] * m[i].slope[c];
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        const double hij = hess[i][j].eval(state);
        if (hij != 0.0)
          slope.noalias() += hij * m[i].values.col(c) * m[j].values.col(c).transpose();
      }
    w.slope[c] = slope;
  }

  // Prefix sums make every grid pair O(1).
  Eigen::VectorXd prefix(n);
  prefix[0] = 0.0;
  for (int c = 0; c + 1 < n; ++c) {
    const Eigen::VectorXd dx = x.increment(c);
    const double step = w.values.col(c).dot(dx) + w.slope[c].cwiseProduct(area.blocks[c]).sum();
    prefix[c + 1] = prefix[c] + step;
  }
  Eigen::VectorXd fz(n);
  for (int c = 0; c < n; ++c) fz[c] = f.eval(z.values.col(c));

  double sup = 0.0;
  for (int s = 0; s < n; ++s)
    for (int t = s + 1; t < n; ++t)
      sup = std::max(sup, std::abs((fz[t] - fz[s]) - (prefix[t] - prefix[s])));
  return sup;
}

}  // namespace fracdev::rough
