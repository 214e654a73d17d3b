#pragma once

#include <Eigen/Core>
#include <stdexcept>

#include "fracdev/fbm.hpp"
#include "fracdev/sde_spec.hpp"

namespace fracdev::solver {

enum class Scheme { Euler, Heun, Rough };

Scheme scheme_from_string(const std::string& name);
const char* scheme_name(Scheme s);

struct Trajectory {
  Grid grid;
  Scheme scheme = Scheme::Euler;
  Eigen::MatrixXd states;  // n x (N+1), column 0 = a
};

struct SolveOptions {
  double divergence_guard = 1e8;
};

struct SolverError : std::runtime_error {
  int step;
  SolverError(int at, const std::string& what)
      : std::runtime_error(what + " at step " + std::to_string(at)), step(at) {}
};

/// Pathwise Euler / Heun steps for H > 1/2 (Young regime).
Trajectory solve_young(const SdeSpec& spec, const fbm::FbmPath& path, Scheme scheme, const SolveOptions& = {});

/// Area-corrected explicit step for 1/3 < H: adds the Milstein-type term
/// sum ( d sigma^{.,j} . sigma^{.,j'} ) area(j', j) per step.
Trajectory solve_rough(const SdeSpec& spec, const fbm::FbmPath& path, const fbm::AreaProcess& area,
                       const SolveOptions& = {});

struct VariationalPath {
  Grid grid;
  int s_index = 0;    // differentiation time as a grid index
  int component = 1;  // noise component j
  Eigen::MatrixXd values;  // n x (N+1); zero before s_index
};

/// Sensitivity of the trajectory to a noise kick at t_s: the linear equation
/// along the frozen trajectory, started at sigma^{.,j}(X_s). Supported for
/// H > 1/2 only.
VariationalPath variational_path(const SdeSpec& spec, const fbm::FbmPath& path, const Trajectory& trajectory,
                                 int s_index, int component, const SolveOptions& = {});

}  // namespace fracdev::solver
