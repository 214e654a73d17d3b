#pragma once

#include <functional>
#include <vector>

namespace fracdev::quad {

/// One node of a tanh-sinh rule on (0,1). `x` and `xc = 1 - x` are both
/// computed directly from the transform so that endpoint distances keep full
/// relative precision (the kernel integrands carry (1-x)^theta factors with
/// theta in (-1,0)).
struct Node {
  double x;
  double xc;
  double w;
};

/// Nodes for \int_0^1 f dx. Handles integrable algebraic endpoint
/// singularities; level L uses step h = 2^-L in the double-exponential
/// variable. Rules are cached per level.
const std::vector<Node>& tanh_sinh_nodes(int level);

double integrate01(const std::function<double(const Node&)>& f, int level = 6);

/// Tensor tanh-sinh over (0,1)^dim, dim <= 3 in practice.
double integrate_cube(int dim, const std::function<double(const Node*)>& f, int level = 6);

}  // namespace fracdev::quad
