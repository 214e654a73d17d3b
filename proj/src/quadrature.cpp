#include "fracdev/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fracdev::quad {

namespace {

std::vector<Node> build_nodes(int level) {
  const double h = std::ldexp(1.0, -level);
  const double half_pi = 1.57079632679489661923132169164;
  std::vector<Node> nodes;
  // k = 0 first, then symmetric pairs outward until the weighted contribution
  // of a node cannot matter even against a (1-x)^(-0.99) blowup.
  for (int k = 0;; ++k) {
    const double t = k * h;
    const double s = half_pi * std::sinh(t);
    const double c = std::cosh(t);
    // x = 1/(1+exp(-2s)), 1-x = 1/(1+exp(2s)); both exact near their endpoint.
    const double xp = 1.0 / (1.0 + std::exp(-2.0 * s));
    const double xm = 1.0 / (1.0 + std::exp(2.0 * s));
    const double sech = 1.0 / std::cosh(s);
    const double w = h * half_pi * c * 0.5 * sech * sech;
    if (xm <= 0.0 || !std::isfinite(w)) break;
    if (k > 0 && w * std::pow(xm, -0.99) < 1e-19) break;
    if (k == 0) {
      nodes.push_back({0.5, 0.5, w});
    } else {
      nodes.push_back({xp, xm, w});
      nodes.push_back({xm, xp, w});
    }
    if (k > (1 << level) * 8) break;  // safety stop
  }
  return nodes;
}

}  // namespace

const std::vector<Node>& tanh_sinh_nodes(int level) {
  static std::mutex mutex;
  static std::map<int, std::vector<Node>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(level);
  if (it == cache.end()) it = cache.emplace(level, build_nodes(level)).first;
  return it->second;
}

double integrate01(const std::function<double(const Node&)>& f, int level) {
  const auto& nodes = tanh_sinh_nodes(level);
  double sum = 0.0;
  for (const auto& n : nodes) sum += n.w * f(n);
  return sum;
}

double integrate_cube(int dim, const std::function<double(const Node*)>& f, int level) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("integrate_cube: dim must be 1..3");
  const auto& nodes = tanh_sinh_nodes(level);
  Node pt[3];
  double sum = 0.0;
  if (dim == 1) {
    for (const auto& a : nodes) {
      pt[0] = a;
      sum += a.w * f(pt);
    }
    return sum;
  }
  if (dim == 2) {
    for (const auto& a : nodes) {
      pt[0] = a;
      double inner = 0.0;
      for (const auto& b : nodes) {
        pt[1] = b;
        inner += b.w * f(pt);
      }
      sum += a.w * inner;
    }
    return sum;
  }
  for (const auto& a : nodes) {
    pt[0] = a;
    double inner_a = 0.0;
    for (const auto& b : nodes) {
      pt[1] = b;
      double inner_b = 0.0;
      for (const auto& c : nodes) {
        pt[2] = c;
        inner_b += c.w * f(pt);
      }
      inner_a += b.w * inner_b;
    }
    sum += a.w * inner_a;
  }
  return sum;
}

}  // namespace fracdev::quad
