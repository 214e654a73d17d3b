#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "fracdev/expr.hpp"
#include "fracdev/fbm.hpp"
#include "fracdev/grid.hpp"

namespace fracdev::rough {

/// Scalar function on the grid (a 0-increment).
struct GridFunction {
  Grid grid;
  Eigen::VectorXd values;  // size N+1
};

/// Scalar 1-increment: values on ordered grid pairs, zero on the diagonal.
struct Increment2 {
  Grid grid;
  Eigen::MatrixXd h;  // (N+1)x(N+1); entry (s,t) meaningful for s <= t

  double operator()(int s, int t) const { return h(s, t); }
};

/// Scalar 2-increment, evaluated lazily (dense storage would be cubic).
struct Increment3 {
  Grid grid;
  std::function<double(int, int, int)> eval;  // (s,u,t) with s <= u <= t

  double operator()(int s, int u, int t) const { return eval(s, u, t); }
};

Increment2 delta(const GridFunction& g);
Increment3 delta(const Increment2& h);

/// sup |h_st| / |t-s|^mu over grid pairs s < t.
double holder_seminorm(const Increment2& h, double mu);
/// sup |h_sut| / |t-s|^mu over grid triples s < u < t.
double holder_seminorm(const Increment3& h, double mu);

/// Largest |delta h| over a sample of grid quadruples (closedness check).
double closedness_defect(const Increment3& h, int max_samples = 20000);

/// Discrete sewing map: the unique preimage of a closed 2-increment under
/// delta that vanishes on adjacent grid pairs. Built as g0 - delta(f) where
/// g0_st = -h(t_0, s, t) and f is the finest-partition primitive of g0.
Increment2 sew(const Increment3& h, double closedness_tol = 1e-8);

/// Finest-partition prefix primitive of a 1-increment: f_k = sum g(t_i, t_i+1).
GridFunction riemann_primitive(const Increment2& g);

// ---------------------------------------------------------------------------
// Controlled paths on a driving path x

/// Row integrand m with values in L^{d,1}: delta m = (mu delta x)^T + r.
struct ControlledRow {
  Grid grid;
  Eigen::MatrixXd values;              // d x (N+1); column k = m_{t_k}^T
  std::vector<Eigen::MatrixXd> slope;  // per grid point, d x d; slope(j', j) pairs with area(j', j)
};

/// Vector-valued weakly controlled path: delta z = zeta delta x + r, with the
/// remainder always evaluated as the exact grid difference.
struct ControlledPath {
  Grid grid;
  Eigen::MatrixXd values;              // k x (N+1)
  std::vector<Eigen::MatrixXd> zeta;   // per grid point, k x d

  Eigen::VectorXd remainder(const fbm::FbmPath& x, int s, int t) const;
};

/// Compensated Riemann sum of Prop.-style integrals over [t_{k0}, t_{k1}]:
/// sum m_{t_i} delta x_i + slope_{t_i} . area_i at the area's resolution.
double compensated_integral(const ControlledRow& m, const fbm::FbmPath& x, const fbm::AreaProcess& area, int k0,
                            int k1);

/// Plain left-point Riemann sum (Young regime).
double young_integral(const Eigen::VectorXd& integrand, const Eigen::VectorXd& integrator, int k0, int k1);

/// phi applied to a controlled path: values phi(z), zeta_hat = grad phi(z) zeta.
ControlledPath compose_controlled(const std::vector<sym::Expr>& phi, const ControlledPath& z);

/// z with delta z = J(m dx) from compensated one-step sums; zeta = m^T rows.
ControlledPath integrate_controlled(const std::vector<ControlledRow>& m, const fbm::FbmPath& x,
                                    const fbm::AreaProcess& area, const Eigen::VectorXd& z0);

/// sup over grid pairs of | delta f(z)_st - J_st((grad f(z))^T m dx) |, the
/// change-of-variable defect. Refining the grid should drive it to zero.
double ito_residual(const sym::Expr& f, const ControlledPath& z, const std::vector<ControlledRow>& m,
                    const fbm::FbmPath& x, const fbm::AreaProcess& area);

}  // namespace fracdev::rough
