#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracdev/elementary.hpp"
#include "fracdev/iterated_moments.hpp"
#include "fracdev/labelled_tree.hpp"
#include "fracdev/sde_spec.hpp"

namespace fracdev::expansion {

struct Term {
  long tree_id = 0;  // 1-based position in the canonical enumeration
  std::string bracket;
  trees::IndexAssignment assignment;
  double coefficient = 0.0;   // F(t)(a)
  double moment = 0.0;        // E(I_t(1)_{0,1})
  double moment_error = 0.0;
  double exponent = 0.0;      // rho(t) = H s + d
  int stochastic = 0;
  int deterministic = 0;
};

struct Expansion {
  int order = 0;  // m: trees with l <= m+1
  double hurst = 0.75;
  double remainder_order = 0.0;  // (m+1) H
  double f_at_a = 0.0;

  std::vector<Term> terms;  // recorded term list (zero rows kept while small)

  struct Aggregate {
    double exponent = 0.0;
    double coefficient = 0.0;
    double error = 0.0;
  };
  std::vector<Aggregate> aggregates;  // merged by exponent, ascending

  long trees_total = 0;
  long terms_total = 0;
  long pruned_odd_stochastic = 0;  // moment vanishes by parity
  long pruned_zero_coefficient = 0;

  double evaluate(double t) const;  // compensated sum over the aggregates
};

struct ExpandOptions {
  int tree_cap = 8;
  std::size_t max_recorded_terms = 100000;
  bool prune_zero = false;  // drop zero rows from the record (still counted)
  moments::MomentOptions moment_options;
  // moment estimation for 1/3 < H <= 1/2 (piecewise-linear path simulation)
  long mc_paths = 20000;
  int mc_steps = 1024;
  std::uint64_t mc_seed = 0x7a57ULL;
};

Expansion expand(const SdeSpec& spec, int order, const ExpandOptions& options = {});

std::string report_text(const Expansion& e);

}  // namespace fracdev::expansion
