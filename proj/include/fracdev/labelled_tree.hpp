#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fracdev/multi_index.hpp"

namespace fracdev::trees {

enum class NodeKind { Root, Deterministic, Stochastic };

struct NodeLabel {
  NodeKind kind = NodeKind::Root;
  int slot = 0;  // 1..s(t) for stochastic nodes (increasing with node number), else 0
};

/// Monotonically labelled stochastic tree. Nodes are numbered 1..l, node 1 is
/// the root, and parent(i) < i for every i >= 2. Stochastic nodes carry
/// variable-index slots 1..s in increasing node order; concrete noise
/// components are supplied separately as an IndexAssignment.
class LabelledTree {
 public:
  LabelledTree();  // the bare root
  LabelledTree(std::vector<int> parents, std::vector<NodeKind> kinds);

  int node_count() const { return static_cast<int>(labels_.size()); }
  int parent(int node) const;             // node in 2..l
  const NodeLabel& label(int node) const; // node in 1..l
  std::vector<int> children(int node) const;  // computed on demand
  int child_count(int node) const;

  int deterministic_count() const { return det_count_; }
  int stochastic_count() const { return sto_count_; }

  /// Parent vector (entries for nodes 2..l), used for canonical ordering.
  std::vector<int> parent_vector() const;

  bool operator==(const LabelledTree& other) const;

 private:
  std::vector<NodeLabel> labels_;  // index 0 -> node 1
  std::vector<int> parents_;       // index 0 -> node 2
  int det_count_ = 0;
  int sto_count_ = 0;
};

struct TreeStats {
  int l = 1;
  int d = 0;
  int s = 0;
  double rho = 0.0;  // H*s + d
};

TreeStats stats(const LabelledTree& tree, double hurst);

/// True iff the number of stochastic nodes is even (the trees whose expected
/// iterated integral can survive).
bool is_stratonovich_class(const LabelledTree& tree);

/// One concrete choice j_1..j_s of noise components for the slots.
using IndexAssignment = std::vector<int>;

/// All d^s assignments in lexicographic order (last slot fastest).
class AssignmentRange {
 public:
  AssignmentRange(int slots, int noise_dim);
  bool next(IndexAssignment& out);
  long long count() const;

 private:
  int slots_;
  int dim_;
  bool started_ = false;
};

std::vector<IndexAssignment> all_assignments(int slots, int noise_dim);

/// Word alpha of length l-1: position i-2 holds 0 for a deterministic node i
/// and the assigned component for a stochastic node i.
MultiIndex label_word(const LabelledTree& tree, const IndexAssignment& assignment);

/// Same, with slot numbers in place of concrete components (0 = deterministic).
std::vector<int> label_word_template(const LabelledTree& tree);

/// Canonical text form, e.g. "([τ_{j2}^4]^2, τ_{j1}^3)^1". Children are
/// printed in increasing node order; superscripts are node numbers.
std::string bracket_string(const LabelledTree& tree);

/// Inverse of bracket_string. Accepts children in any order (node numbers are
/// explicit) and renormalizes slot names to the increasing-node convention.
LabelledTree parse_bracket(const std::string& text);

struct EnumerationLimits {
  int node_cap = 8;  // (l-1)! * 2^(l-1) trees at level l
};

/// Streams every tree with l(t) <= max_nodes exactly once, ordered by node
/// count, then lexicographic parent vector, then label word (deterministic
/// before stochastic).
void for_each_tree(int max_nodes, const std::function<void(const LabelledTree&)>& fn,
                   const EnumerationLimits& limits = {});

std::vector<LabelledTree> enumerate_lts(int max_nodes, const EnumerationLimits& limits = {});

/// Number of labelled trees with exactly `nodes` nodes: (l-1)! * 2^(l-1).
std::uint64_t level_count(int nodes);

}  // namespace fracdev::trees
