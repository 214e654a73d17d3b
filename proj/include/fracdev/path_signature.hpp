#pragma once

#include <Eigen/Core>
#include <vector>

#include "fracdev/fbm.hpp"
#include "fracdev/multi_index.hpp"

namespace fracdev::sig {

/// Truncated signature of a piecewise-linear path over the alphabet
/// {0 = time, 1..d = noise components}. Each linear segment contributes its
/// tensor exponential through Chen's identity, so every component is the
/// exact iterated Stratonovich integral of the interpolated path. The word
/// component for alpha reads position 0 as the innermost (earliest)
/// integration variable.
class Signature {
 public:
  Signature(int letters, int level);

  void reset();
  void append_segment(const Eigen::VectorXd& increment);  // size = letters

  double word(const std::vector<int>& alpha) const;
  double word(const MultiIndex& alpha) const { return word(alpha.word); }

  int letters() const { return letters_; }
  int level() const { return level_; }

 private:
  int letters_;
  int level_;
  std::vector<std::size_t> offset_;  // start of each level in data_
  std::vector<double> data_;
  std::vector<double> seg_;   // scratch: exponential of a segment
  std::vector<double> next_;  // scratch: updated signature
};

/// Exact PL iterated integral of the constant integrand 1 over grid window
/// [t_{k0}, t_{k1}]: \int_{k0 <= u_1 < ... < u_r <= k1} dx^{alpha}.
double iterated_integral(const fbm::FbmPath& path, const MultiIndex& alpha, int k0, int k1);

/// Same with a state-dependent weight at the innermost position:
/// J_1 = \int g dB^{a_1}, J_i = \int J_{i-1} dB^{a_i}; trapezoid per step.
double weighted_iterated_integral(const fbm::FbmPath& path, const MultiIndex& alpha,
                                  const Eigen::VectorXd& weight_on_grid, int k0, int k1);

}  // namespace fracdev::sig
