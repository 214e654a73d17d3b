#include "fracdev/path_signature.hpp"

#include <stdexcept>

namespace fracdev::sig {

Signature::Signature(int letters, int level) : letters_(letters), level_(level) {
  if (letters < 1 || level < 1) throw std::invalid_argument("Signature: need letters >= 1 and level >= 1");
  offset_.assign(level + 1, 0);
  std::size_t total = 1;  // level 0 scalar
  std::size_t size = 1;
  for (int l = 1; l <= level; ++l) {
    offset_[l] = total;
    size *= letters;
    total += size;
  }
  data_.assign(total, 0.0);
  seg_.assign(total, 0.0);
  next_.assign(total, 0.0);
  reset();
}

void Signature::reset() {
  std::fill(data_.begin(), data_.end(), 0.0);
  data_[0] = 1.0;
}

void Signature::append_segment(const Eigen::VectorXd& increment) {
  if (increment.size() != letters_) throw std::invalid_argument("Signature: increment size mismatch");
  const int A = letters_;

  //

  // tensor exponential of the segment: level l = increment^{tensor l} / l!
  seg_[0] = 1.0;
  std::size_t prev_off = 0, prev_size = 1;
  for (int l = 1; l <= level_; ++l) {
    const std::size_t off = offset_[l];
    const std::size_t size = prev_size * A;
    const double inv = 1.0 / l;
    for (std::size_t u = 0; u < prev_size; ++u) {
      const double base = seg_[prev_off + u] * inv;
      for (int a = 0; a < A; ++a) seg_[off + u * A + a] = base * increment[a];
    }
    prev_off = off;
    prev_size = size;
  }

  // Chen: S <- S (x) seg
  next_[0] = 1.0;
  std::size_t size_l = 1;
  for (int l = 1; l <= level_; ++l) {
    size_l *= A;
    const std::size_t off_l = offset_[l];
    // i = 0 term: S_l * seg_0
    for (std::size_t w = 0; w < size_l; ++w) next_[off_l + w] = data_[off_l + w];
    std::size_t size_i = 1;
    for (int i = 1; i <= l; ++i) {
      size_i *= A;  // length of the appended word from the segment
      const std::size_t size_head = size_l / size_i;
      const std::size_t off_head = offset_[l - i];
      const std::size_t off_tail = offset_[i];
      for (std::size_t u = 0; u < size_head; ++u) {
        const double head = data_[off_head + u];
        if (head == 0.0) continue;
        double* out = &next_[off_l + u * size_i];
        const double* tail = &seg_[off_tail];
        for (std::size_t v = 0; v < size_i; ++v) out[v] += head * tail[v];
      }
    }
  }
  std::copy(next_.begin(), next_.end(), data_.begin());
}

double Signature::word(const std::vector<int>& alpha) const {
  const int l = static_cast<int>(alpha.size());
  if (l > level_) throw std::invalid_argument("Signature: word longer than the truncation level");
  std::size_t rank = 0;
  for (int i = 0; i < l; ++i) {
    if (alpha[i] < 0 || alpha[i] >= letters_) throw std::invalid_argument("Signature: letter out of range");
    rank = rank * letters_ + alpha[i];
  }
  return data_[offset_[l] + rank];
}

double iterated_integral(const fbm::FbmPath& path, const MultiIndex& alpha, int k0, int k1) {
  const int r = alpha.length();
  if (r == 0) return 1.0;
  int maxletter = 0;
  for (int a : alpha.word) maxletter = std::max(maxletter, a);
  if (maxletter > path.dim) throw std::invalid_argument("iterated_integral: word uses more components than the path");
  Signature sig(path.dim + 1, r);
  Eigen::VectorXd inc(path.dim + 1);
  const double dt = path.grid.dt();
  for (int k = k0; k < k1; ++k) {
    inc[0] = dt;
    inc.tail(path.dim) = path.increment(k);
    sig.append_segment(inc);
  }
  return sig.word(alpha);
}

double weighted_iterated_integral(const fbm::FbmPath& path, const MultiIndex& alpha,
                                  const Eigen::VectorXd& weight_on_grid, int k0, int k1) {
  const int r = alpha.length();
  if (weight_on_grid.size() != path.grid.steps + 1)
    throw std::invalid_argument("weighted_iterated_integral: weight must live on the grid");
  if (r == 0) return weight_on_grid[k1];
  const double dt = path.grid.dt();
  const int window = k1 - k0;
  Eigen::VectorXd lower = weight_on_grid.segment(k0, window + 1);
  Eigen::VectorXd upper(window + 1);
  for (int level = 0; level < r; ++level) {
    const int letter = alpha.word[level];
    upper[0] = 0.0;
    for (int k = 0; k < window; ++k) {
      const double dx = letter == 0 ? dt : path.values(letter - 1, k0 + k + 1) - path.values(letter - 1, k0 + k);
      upper[k + 1] = upper[k] + 0.5 * (lower[k] + lower[k + 1]) * dx;
    }
    lower = upper;
  }
  return lower[window];
}

}  // namespace fracdev::sig
