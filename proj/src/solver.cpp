#include "fracdev/solver.hpp"

#include <cmath>

namespace fracdev::solver {

Scheme scheme_from_string(const std::string& name) {
  if (name == "euler") return Scheme::Euler;
  if (name == "heun") return Scheme::Heun;
  if (name == "rough") return Scheme::Rough;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected euler, heun or rough)");
}

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Euler: return "euler";
    case Scheme::Heun: return "heun";
    case Scheme::Rough: return "rough";
  }
  return "?";
}

namespace {

void check_state(const Eigen::VectorXd& x, double guard, int step) {
  if (!x.allFinite() || x.cwiseAbs().maxCoeff() > guard)
    throw SolverError(step, "state left the divergence guard |X| <= " + std::to_string(guard));
}

void check_inputs(const SdeSpec& spec, const fbm::FbmPath& path) {
  spec.validate();
  if (path.dim != spec.d) throw std::invalid_argument("solver: path dimension must equal the noise dimension");
  if (std::abs(path.hurst - spec.hurst) > 1e-12)
    throw std::invalid_argument("solver: path Hurst index must match the specification");
}

}  // namespace

Trajectory solve_young(const SdeSpec& spec, const fbm::FbmPath& path, Scheme scheme, const SolveOptions& options) {
  check_inputs(spec, path);
  if (!(spec.hurst > 0.5)) throw std::invalid_argument("solve_young: requires H > 1/2");
  if (scheme == Scheme::Rough) throw std::invalid_argument("solve_young: use solve_rough for the area-corrected step");

  const int N = path.grid.steps;
  const double dt = path.grid.dt();
  Trajectory out{path.grid, scheme, Eigen::MatrixXd(spec.n, N + 1)};
  Eigen::VectorXd x = spec.initial;
  out.states.col(0) = x;
  for (int k = 0; k < N; ++k) {
    const Eigen::VectorXd db = path.increment(k);
    try {
      const Eigen::VectorXd b0 = spec.drift_at(x);
      const Eigen::MatrixXd s0 = spec.diffusion_at(x);
      Eigen::VectorXd next = x + b0 * dt + s0 * db;
      if (scheme == Scheme::Heun) {
        const Eigen::VectorXd b1 = spec.drift_at(next);
        const Eigen::MatrixXd s1 = spec.diffusion_at(next);
        next = x + 0.5 * (b0 + b1) * dt + 0.5 * (s0 + s1) * db;
      }
      x = next;
    } catch (const sym::EvalError& err) {
      throw SolverError(k, err.what());
    }
    check_state(x, options.divergence_guard, k);
    out.states.col(k + 1) = x;
  }
  return out;
}

Trajectory solve_rough(const SdeSpec& spec, const fbm::FbmPath& path, const fbm::AreaProcess& area,
                       const SolveOptions& options) {
  check_inputs(spec, path);
  if (area.coarse.steps != path.grid.steps)
    throw std::invalid_argument("solve_rough: area must be given per path step");

  // d sigma^{i,j} / d x_k, prepared once.
  std::vector<std::vector<std::vector<sym::Expr>>> dsigma(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    dsigma[i].resize(spec.d);
    for (int j = 0; j < spec.d; ++j) {
      dsigma[i][j].reserve(spec.n);
      for (int k = 1; k <= spec.n; ++k) dsigma[i][j].push_back(sym::differentiate(spec.diffusion[i][j], k));
    }
  }

  const int N = path.grid.steps;
  const double dt = path.grid.dt();
  Trajectory out{path.grid, Scheme::Rough, Eigen::MatrixXd(spec.n, N + 1)};
  Eigen::VectorXd x = spec.initial;
  out.states.col(0) = x;
  for (int k = 0; k < N; ++k) {
    const Eigen::VectorXd db = path.increment(k);
    try {
      const Eigen::VectorXd b0 = spec.drift_at(x);
      const Eigen::MatrixXd s0 = spec.diffusion_at(x);
      Eigen::VectorXd next = x + b0 * dt + s0 * db;
      const Eigen::MatrixXd& a = area.blocks[k];  // a(j', j), j' inner
      for (int i = 0; i < spec.n; ++i) {
        double corr = 0.0;
        for (int j = 0; j < spec.d; ++j)
          for (int kk = 0; kk < spec.n; ++kk) {
            const sym::Expr& der = dsigma[i][j][kk];
            if (der.is_zero()) continue;
            const double dval = der.eval(x);
            if (dval == 0.0) continue;
            for (int jp = 0; jp < spec.d; ++jp) corr += dval * s0(kk, jp) * a(jp, j);
          }
        next[i] += corr;
      }
      x = next;
    } catch (const sym::EvalError& err) {
      throw SolverError(k, err.what());
    }
    check_state(x, options.divergence_guard, k);
    out.states.col(k + 1) = x;
  }
  return out;
}

VariationalPath variational_path(const SdeSpec& spec, const fbm::FbmPath& path, const Trajectory& trajectory,
                                 int s_index, int component, const SolveOptions& options) {
  check_inputs(spec, path);
  if (!(spec.hurst > 0.5))
    throw std::invalid_argument("variational_path: unsupported for H <= 1/2 (linear equation stated for H > 1/2)");
  if (component < 1 || component > spec.d) throw std::invalid_argument("variational_path: bad noise component");
  const int N = path.grid.steps;
  if (s_index < 0 || s_index > N) throw std::invalid_argument("variational_path: s must be a grid point");
  if (trajectory.grid != path.grid) throw std::invalid_argument("variational_path: trajectory/path grid mismatch");

  // Jacobians of drift and diffusion, prepared once.
  std::vector<std::vector<sym::Expr>> db(spec.n);
  std::vector<std::vector<std::vector<sym::Expr>>> ds(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    db[i].reserve(spec.n);
    for (int k = 1; k <= spec.n; ++k) db[i].push_back(sym::differentiate(spec.drift[i], k));
    ds[i].resize(spec.d);
    for (int j = 0; j < spec.d; ++j)
      for (int k = 1; k <= spec.n; ++k) ds[i][j].push_back(sym::differentiate(spec.diffusion[i][j], k));
  }
  auto jacobians = [&](const Eigen::VectorXd& x, Eigen::MatrixXd& jb, std::vector<Eigen::MatrixXd>& js) {
    for (int i = 0; i < spec.n; ++i)
      for (int k = 0; k < spec.n; ++k) jb(i, k) = db[i][k].eval(x);
    for (int j = 0; j < spec.d; ++j)
      for (int i = 0; i < spec.n; ++i)
        for (int k = 0; k < spec.n; ++k) js[j](i, k) = ds[i][j][k].eval(x);
  };

  VariationalPath out{path.grid, s_index, component, Eigen::MatrixXd::Zero(spec.n, N + 1)};
  Eigen::VectorXd v(spec.n);
  {
    const Eigen::VectorXd xs = trajectory.states.col(s_index);
    for (int i = 0; i < spec.n; ++i) v[i] = spec.diffusion[i][component - 1].eval(xs);
  }
  out.values.col(s_index) = v;

  const double dt = path.grid.dt();
  Eigen::MatrixXd jb0(spec.n, spec.n), jb1(spec.n, spec.n);
  std::vector<Eigen::MatrixXd> js0(spec.d, Eigen::MatrixXd(spec.n, spec.n));
  std::vector<Eigen::MatrixXd> js1(spec.d, Eigen::MatrixXd(spec.n, spec.n));
  for (int k = s_index; k < N; ++k) {
    const Eigen::VectorXd dbk = path.increment(k);
    try {
      jacobians(trajectory.states.col(k), jb0, js0);
      Eigen::VectorXd incr = jb0 * v * dt;
      for (int j = 0; j < spec.d; ++j) incr += js0[j] * v * dbk[j];
      Eigen::VectorXd next = v + incr;
      if (trajectory.scheme == Scheme::Heun) {
        jacobians(trajectory.states.col(k + 1), jb1, js1);
        Eigen::VectorXd incr1 = jb1 * next * dt;
        for (int j = 0; j < spec.d; ++j) incr1 += js1[j] * next * dbk[j];
        next = v + 0.5 * (incr + incr1);
      }
      v = next;
    } catch (const sym::EvalError& err) {
      throw SolverError(k, err.what());
    }
    check_state(v, options.divergence_guard, k);
    out.values.col(k + 1) = v;
  }
  return out;
}

}  // namespace fracdev::solver
