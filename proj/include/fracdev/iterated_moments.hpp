#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fracdev/multi_index.hpp"

namespace fracdev::moments {

/// Perfect matching of the nonzero positions of a word into pairs with equal
/// letters (0-based positions, first < second).
struct Matching {
  std::vector<std::pair<int, int>> pairs;
};

struct MomentResult {
  enum class Method { ExactClosedForm, Quadrature, MonteCarlo };
  double value = 0.0;
  double error_estimate = 0.0;  // 0 only for exact values
  Method method = Method::ExactClosedForm;
  int matchings = 0;
};

struct MomentOptions {
  int max_length = 8;        // cap on l(alpha)
  int quad_level_2d = 6;     // tanh-sinh level for 2-dim irreducible kernels
  int quad_level_3d = 5;
  long mc_points = 1000000;  // Dirichlet Monte Carlo fallback
  std::uint64_t mc_seed = 0x5eed5eedULL;
  bool force_pairing = false;  // disable closed-form shortcuts (cross-checks)
};

/// All pairings of J_alpha whose pairs carry equal letters; empty when some
/// letter occurs an odd number of times.
std::vector<Matching> valid_matchings(const MultiIndex& alpha);

struct KernelIntegral {
  double value = 0.0;
  double error = 0.0;
  bool exact = true;
};

/// \int_{0 < t_1 < ... < t_k < 1} prod_{(p,q)} (t_q - t_p)^{2H-2} dt over
/// 0-based position pairs. Exact via Gamma-function reductions whenever the
/// pair spans nest or are disjoint; properly overlapping (crossing) groups go
/// through tanh-sinh quadrature up to three dimensions and Dirichlet Monte
/// Carlo beyond.
KernelIntegral simplex_kernel_integral(int k, const std::vector<std::pair<int, int>>& pairs, double hurst,
                                       const MomentOptions& options = {});

/// E \int_{Delta^k([0,1])} dB^alpha for H > 1/2 via the pairing sum
/// gamma_H^{q} * sum over valid matchings of the kernel integral. Words over
/// a single noise letter use the exact B_1^k/k! closed form.
MomentResult expected_iterated_integral(const MultiIndex& alpha, double hurst, const MomentOptions& options = {});

/// E | \int_{Delta^k([0,1])} dB^alpha |^2 via matchings of the doubled word
/// over the product of two simplices (shuffle decomposition); closed forms
/// for all-zero and single-letter words; Monte Carlo for long mixed words.
MomentResult second_moment_iterated_integral(const MultiIndex& alpha, double hurst,
                                             const MomentOptions& options = {});

/// Splits the word at a position carrying `component` (1-based position into
/// the word): returns the left and right sub-words.
std::pair<MultiIndex, MultiIndex> derivative_split(const MultiIndex& alpha, int component, int position);

/// Path-simulation estimate of E \int dB^alpha over [0,1] (any H in (0,1));
/// piecewise-linear iterated integrals over `paths` sampled paths.
struct PathEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long paths = 0;
};
PathEstimate mc_expected_iterated_integral(const MultiIndex& alpha, double hurst, long paths, int steps,
                                           std::uint64_t seed);
PathEstimate mc_second_moment_iterated_integral(const MultiIndex& alpha, double hurst, long paths, int steps,
                                                std::uint64_t seed);

/// Monte Carlo positivity probe for E prod_i \int_{Delta^{m_i}([s_i,t_i])}
/// dB^{alpha_i}; estimates below -3 standard errors are flagged.
struct PositivityTerm {
  MultiIndex alpha;
  double t0 = 0.0;
  double t1 = 1.0;
};
struct PositivityReport {
  double estimate = 0.0;
  double std_error = 0.0;
  bool flagged = false;
};
PositivityReport positivity_check(const std::vector<PositivityTerm>& terms, double hurst, long paths, int steps,
                                  std::uint64_t seed);

}  // namespace fracdev::moments
