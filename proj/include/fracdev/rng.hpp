#pragma once

#include <cmath>
#include <cstdint>

namespace fracdev {

/// splitmix64. Small, fast and deterministic across platforms, which is what
/// the per-path seed derivation needs.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in the open interval (0,1).
  double uniform01() { return (next() >> 11) * 0x1.0p-53 + 0x1.0p-54; }
};

/// Derived stream seed for a work item (path index, criterion index, ...).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  SplitMix64 s(master ^ (0xd1342543de82ef95ULL * (index + 1)));
  s.next();
  return s.next();
}

/// Box-Muller standard normals on top of SplitMix64. std::normal_distribution
/// is avoided on purpose: its draw sequence is not pinned by the standard.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = rng_.uniform01();
    const double v = rng_.uniform01();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double a = 6.28318530717958647692528676656 * v;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  SplitMix64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace fracdev
