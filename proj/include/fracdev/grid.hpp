#pragma once

#include <stdexcept>

namespace fracdev {

/// Uniform time grid t_k = k*T/N for k = 0..N.
struct Grid {
  double horizon = 1.0;  // T
  int steps = 1;         // N

  Grid() = default;
  Grid(double T, int N) : horizon(T), steps(N) {
    if (!(horizon > 0.0)) throw std::invalid_argument("Grid: horizon must be positive");
    if (steps < 1) throw std::invalid_argument("Grid: need at least one step");
  }

  double dt() const { return horizon / steps; }
  double time(int k) const { return horizon * k / steps; }
  int points() const { return steps + 1; }

  bool operator==(const Grid&) const = default;
};

}  // namespace fracdev
