#include "fracdev/fbm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <unsupported/Eigen/FFT>

#include "fracdev/rng.hpp"

namespace fracdev::fbm {

double covariance(double hurst, double t, double s) {
  if (t < 0.0 || s < 0.0) throw std::invalid_argument("covariance: times must be nonnegative");
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
}

namespace {

// Autocovariance of the increment process at unit step, scaled by dt^2H.
double fgn_autocov(double hurst, int lag, double dt) {
  const double h2 = 2.0 * hurst;
  const double k = std::abs(lag);
  return 0.5 * std::pow(dt, h2) *
         (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(std::abs(k - 1.0), h2));
}

}  // namespace

struct FbmSampler::Impl {
  double hurst;
  Grid grid;
  int dim;
  SampleMethod method;
  Eigen::VectorXd spectrum_sqrt;  // circulant path: sqrt(lambda_k / M)
  Eigen::MatrixXd chol_lower;     // dense path
  mutable Eigen::FFT<double> fft;
};

FbmSampler::FbmSampler(double hurst, const Grid& grid, int dim, SampleMethod method)
    : impl_(std::make_unique<Impl>()) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("FbmSampler: Hurst index must lie in (0,1)");
  if (dim < 1) throw std::invalid_argument("FbmSampler: dimension must be >= 1");
  impl_->hurst = hurst;
  impl_->grid = grid;
  impl_->dim = dim;

  const int N = grid.steps;
  const double dt = grid.dt();

  if (method != SampleMethod::DenseFactorization) {
    // Minimal circulant embedding of the Toeplitz increment covariance.
    const int M = 2 * N;
    Eigen::VectorXd c(M);
    for (int j = 0; j < M; ++j) c[j] = fgn_autocov(hurst, j <= N ? j : M - j, dt);
    std::vector<std::complex<double>> in(M), out(M);
    for (int j = 0; j < M; ++j) in[j] = c[j];
    impl_->fft.fwd(out, in);
    double min_ev = out[0].real(), max_ev = out[0].real();
    for (int j = 0; j < M; ++j) {
      min_ev = std::min(min_ev, out[j].real());
      max_ev = std::max(max_ev, out[j].real());
    }
    if (min_ev > -1e-9 * std::max(max_ev, 1e-300)) {
      impl_->spectrum_sqrt.resize(M);
      for (int j = 0; j < M; ++j) impl_->spectrum_sqrt[j] = std::sqrt(std::max(out[j].real(), 0.0) / M);
      impl_->method = SampleMethod::CirculantEmbedding;
      return;
    }
    if (method == SampleMethod::CirculantEmbedding)
      throw std::runtime_error("FbmSampler: circulant embedding not nonnegative (smallest eigenvalue " +
                               std::to_string(min_ev) + ")");
  }

  // Dense route: Cholesky of the N x N increment covariance.
  if (N > 4096) throw std::runtime_error("FbmSampler: dense factorization limited to 4096 steps");
  Eigen::MatrixXd cov(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) cov(i, j) = fgn_autocov(hurst, i - j, dt);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
    throw std::runtime_error("FbmSampler: increment covariance not numerically PSD (smallest eigenvalue " +
                             std::to_string(es.eigenvalues().minCoeff()) + ")");
  }
  impl_->chol_lower = llt.matrixL();
  impl_->method = SampleMethod::DenseFactorization;
}

FbmSampler::~FbmSampler() = default;
FbmSampler::FbmSampler(FbmSampler&&) noexcept = default;

SampleMethod FbmSampler::method() const { return impl_->method; }
double FbmSampler::hurst() const { return impl_->hurst; }
const Grid& FbmSampler::grid() const { return impl_->grid; }

FbmPath FbmSampler::sample(std::uint64_t seed, bool negate_noise) const {
  const int N = impl_->grid.steps;
  FbmPath path;
  path.grid = impl_->grid;
  path.hurst = impl_->hurst;
  path.dim = impl_->dim;
  path.seed = seed;
  path.values = Eigen::MatrixXd::Zero(impl_->dim, N + 1);

  GaussianStream gauss(seed);
  const double sign = negate_noise ? -1.0 : 1.0;

  for (int comp = 0; comp < impl_->dim; ++comp) {
    Eigen::VectorXd fgn(N);
    if (impl_->method == SampleMethod::CirculantEmbedding) {
      const int M = 2 * N;
      std::vector<std::complex<double>> w(M), y(M);
      const auto& s = impl_->spectrum_sqrt;
      w[0] = s[0] * gauss.next();
      const double inv_sqrt2 = 0.70710678118654752440084436210;
      for (int k = 1; k < N; ++k) {
        const double a = gauss.next();
        const double b = gauss.next();
        w[k] = std::complex<double>(a, b) * (s[k] * inv_sqrt2);
        w[M - k] = std::conj(w[k]);
      }
      w[N] = s[N] * gauss.next();
      impl_->fft.fwd(y, w);
      for (int k = 0; k < N; ++k) fgn[k] = y[k].real();
    } else {
      Eigen::VectorXd g(N);
      for (int k = 0; k < N; ++k) g[k] = gauss.next();
      fgn = impl_->chol_lower * g;
    }
    double acc = 0.0;
    for (int k = 0; k < N; ++k) {
      acc += sign * fgn[k];
      path.values(comp, k + 1) = acc;
    }
  }
  return path;
}

FbmPath sample_path(double hurst, const Grid& grid, int dim, std::uint64_t seed, SampleMethod method) {
  return FbmSampler(hurst, grid, dim, method).sample(seed);
}

FbmPath subsample(const FbmPath& path, int factor) {
  if (factor < 1 || path.grid.steps % factor != 0)
    throw std::invalid_argument("subsample: factor must divide the step count");
  FbmPath out;
  out.grid = Grid(path.grid.horizon, path.grid.steps / factor);
  out.hurst = path.hurst;
  out.dim = path.dim;
  out.seed = path.seed;
  out.values.resize(path.dim, out.grid.steps + 1);
  for (int k = 0; k <= out.grid.steps; ++k) out.values.col(k) = path.values.col(k * factor);
  return out;
}

AreaProcess levy_area(const FbmPath& path, int block) {
  const int N = path.grid.steps;
  if (block < 1 || N % block != 0) throw std::invalid_argument("levy_area: block must divide the step count");
  AreaProcess area;
  area.coarse = Grid(path.grid.horizon, N / block);
  area.block = block;
  area.blocks.reserve(N / block);
  const int d = path.dim;
  for (int b = 0; b < N / block; ++b) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    const Eigen::VectorXd start = path.values.col(b * block);
    for (int f = 0; f < block; ++f) {
      const int k = b * block + f;
      const Eigen::VectorXd pre = path.values.col(k) - start;       // B_{t_k} - B_{t_s}
      const Eigen::VectorXd inc = path.increment(k);                 // delta B over the fine step
      // trapezoid rule, exact for the piecewise-linear interpolation:
      // inner component i, outer j
      a.noalias() += pre * inc.transpose();
      a.noalias() += 0.5 * inc * inc.transpose();
    }
    area.blocks.push_back(std::move(a));
  }
  return area;
}

}  // namespace fracdev::fbm
