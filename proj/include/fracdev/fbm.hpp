#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

#include "fracdev/grid.hpp"

namespace fracdev::fbm {

/// R_H(t,s) = (s^2H + t^2H - |t-s|^2H)/2.
double covariance(double hurst, double t, double s);

struct FbmPath {
  Grid grid;
  double hurst = 0.5;
  int dim = 1;
  std::uint64_t seed = 0;
  Eigen::MatrixXd values;  // dim x (N+1), column k = B_{t_k}, B_0 = 0

  Eigen::VectorXd increment(int k) const { return values.col(k + 1) - values.col(k); }
};

enum class SampleMethod { Auto, CirculantEmbedding, DenseFactorization };

/// Exact-in-law sampler for d independent fBm components on a uniform grid.
/// Precomputes the circulant spectrum of the increment process (or a dense
/// Cholesky factor as fallback) once per (H, grid); sampling then costs two
/// FFTs per component. Deterministic given the seed.
class FbmSampler {
 public:
  FbmSampler(double hurst, const Grid& grid, int dim, SampleMethod method = SampleMethod::Auto);
  ~FbmSampler();
  FbmSampler(FbmSampler&&) noexcept;

  /// negate_noise flips the sign of every Gaussian draw (antithetic path).
  FbmPath sample(std::uint64_t seed, bool negate_noise = false) const;

  SampleMethod method() const;
  double hurst() const;
  const Grid& grid() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

FbmPath sample_path(double hurst, const Grid& grid, int dim, std::uint64_t seed,
                    SampleMethod method = SampleMethod::Auto);

/// Keep every `factor`-th point.
FbmPath subsample(const FbmPath& path, int factor);

/// Second-order increments of the piecewise-linear interpolation, one d x d
/// matrix per coarse step. Entry (i,j) is the iterated integral with
/// component i integrated first (inner) and j second, so the diagonal equals
/// (delta B^i)^2 / 2 per block and Chen's relation holds exactly.
struct AreaProcess {
  Grid coarse;
  int block = 1;  // fine steps per coarse step
  std::vector<Eigen::MatrixXd> blocks;
};

AreaProcess levy_area(const FbmPath& path, int block = 1);

}  // namespace fracdev::fbm
