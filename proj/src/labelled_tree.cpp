#include "fracdev/labelled_tree.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

namespace fracdev::trees {

LabelledTree::LabelledTree() : labels_(1) {}

LabelledTree::LabelledTree(std::vector<int> parents, std::vector<NodeKind> kinds) {
  const int l = static_cast<int>(kinds.size());
  if (l < 1) throw std::invalid_argument("LabelledTree: need at least the root");
  if (static_cast<int>(parents.size()) != l - 1)
    throw std::invalid_argument("LabelledTree: parent vector must cover nodes 2..l");
  if (kinds[0] != NodeKind::Root) throw std::invalid_argument("LabelledTree: node 1 must carry the root label");
  labels_.resize(l);
  parents_ = std::move(parents);
  labels_[0] = NodeLabel{NodeKind::Root, 0};
  int slot = 0;
  for (int node = 2; node <= l; ++node) {
    const int p = parents_[node - 2];
    if (p < 1 || p >= node) throw std::invalid_argument("LabelledTree: monotone labelling requires parent(i) < i");
    const NodeKind kind = kinds[node - 1];
    if (kind == NodeKind::Root) throw std::invalid_argument("LabelledTree: only node 1 may be the root");
    labels_[node - 1] = NodeLabel{kind, kind == NodeKind::Stochastic ? ++slot : 0};
    if (kind == NodeKind::Deterministic)
      ++det_count_;
    else
      ++sto_count_;
  }
}

int LabelledTree::parent(int node) const {
  if (node < 2 || node > node_count()) throw std::out_of_range("LabelledTree::parent");
  return parents_[node - 2];
}

const NodeLabel& LabelledTree::label(int node) const {
  if (node < 1 || node > node_count()) throw std::out_of_range("LabelledTree::label");
  return labels_[node - 1];
}

std::vector<int> LabelledTree::children(int node) const {
  if (node < 1 || node > node_count()) throw std::out_of_range("LabelledTree::children");
  std::vector<int> kids;
  for (int i = 2; i <= node_count(); ++i)
    if (parents_[i - 2] == node) kids.push_back(i);
  return kids;
}

int LabelledTree::child_count(int node) const {
  if (node < 1 || node > node_count()) throw std::out_of_range("LabelledTree::child_count");
  int c = 0;
  for (int i = 2; i <= node_count(); ++i)
    if (parents_[i - 2] == node) ++c;
  return c;
}

std::vector<int> LabelledTree::parent_vector() const { return parents_; }

bool LabelledTree::operator==(const LabelledTree& other) const {
  if (node_count() != other.node_count() || parents_ != other.parents_) return false;
  for (int i = 0; i < node_count(); ++i)
    if (labels_[i].kind != other.labels_[i].kind || labels_[i].slot != other.labels_[i].slot) return false;
  return true;
}

TreeStats stats(const LabelledTree& tree, double hurst) {
  if (!(hurst > 1.0 / 3.0 && hurst < 1.0)) throw std::invalid_argument("stats: Hurst index must lie in (1/3,1)");
  TreeStats st;
  st.l = tree.node_count();
  st.d = tree.deterministic_count();
  st.s = tree.stochastic_count();
  st.rho = hurst * st.s + st.d;
  return st;
}

bool is_stratonovich_class(const LabelledTree& tree) { return tree.stochastic_count() % 2 == 0; }

AssignmentRange::AssignmentRange(int slots, int noise_dim) : slots_(slots), dim_(noise_dim) {
  if (noise_dim < 1) throw std::invalid_argument("AssignmentRange: noise dimension must be >= 1");
}

bool AssignmentRange::next(IndexAssignment& out) {
  if (!started_) {
    started_ = true;
    out.assign(slots_, 1);
    return true;
  }
  for (int i = slots_ - 1; i >= 0; --i) {
    if (out[i] < dim_) {
      ++out[i];
      std::fill(out.begin() + i + 1, out.end(), 1);
      return true;
    }
  }
  return false;
}

long long AssignmentRange::count() const {
  long long c = 1;
  for (int i = 0; i < slots_; ++i) c *= dim_;
  return c;
}

std::vector<IndexAssignment> all_assignments(int slots, int noise_dim) {
  AssignmentRange range(slots, noise_dim);
  std::vector<IndexAssignment> out;
  IndexAssignment a;
  while (range.next(a)) out.push_back(a);
  return out;
}

MultiIndex label_word(const LabelledTree& tree, const IndexAssignment& assignment) {
  if (static_cast<int>(assignment.size()) != tree.stochastic_count())
    throw std::invalid_argument("label_word: assignment must cover every stochastic slot");
  std::vector<int> word(tree.node_count() - 1, 0);
  for (int node = 2; node <= tree.node_count(); ++node) {
    const NodeLabel& lab = tree.label(node);
    if (lab.kind == NodeKind::Stochastic) word[node - 2] = assignment[lab.slot - 1];
  }
  return MultiIndex(std::move(word));
}

std::vector<int> label_word_template(const LabelledTree& tree) {
  std::vector<int> word(tree.node_count() - 1, 0);
  for (int node = 2; node <= tree.node_count(); ++node) {
    const NodeLabel& lab = tree.label(node);
    if (lab.kind == NodeKind::Stochastic) word[node - 2] = lab.slot;
  }
  return word;
}

namespace {

void append_node(const LabelledTree& tree, int node, std::string& out) {
  const NodeLabel& lab = tree.label(node);
  auto kids = tree.children(node);
  // canonical child order: deterministic subtrees first, then stochastic,
  // each in increasing node order (the published convention)
  std::stable_sort(kids.begin(), kids.end(), [&](int a, int b) {
    const bool da = tree.label(a).kind == NodeKind::Deterministic;
    const bool db = tree.label(b).kind == NodeKind::Deterministic;
    if (da != db) return da;
    return a < b;
  });
  if (kids.empty()) {
    switch (lab.kind) {
      case NodeKind::Root: out += "γ^1"; return;
      case NodeKind::Deterministic: out += "τ_0^" + std::to_string(node); return;
      case NodeKind::Stochastic:
        out += "τ_{j" + std::to_string(lab.slot) + "}^" + std::to_string(node);
        return;
    }
  }
  const char open = lab.kind == NodeKind::Root ? '(' : lab.kind == NodeKind::Deterministic ? '[' : '{';
  const char close = lab.kind == NodeKind::Root ? ')' : lab.kind == NodeKind::Deterministic ? ']' : '}';
  out += open;
  for (std::size_t i = 0; i < kids.size(); ++i) {
    if (i) out += ", ";
    append_node(tree, kids[i], out);
  }
  out += close;
  if (lab.kind == NodeKind::Stochastic) out += "_{j" + std::to_string(lab.slot) + "}";
  out += "^" + std::to_string(node);
}

struct BracketParser {
  const std::string& text;
  std::size_t pos = 0;

  explicit BracketParser(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("parse_bracket: " + what + " at offset " + std::to_string(pos));
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool consume(const std::string& s) {
    if (text.compare(pos, s.size(), s) == 0) {
      pos += s.size();
      return true;
    }
    return false;
  }

  int number() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) fail("expected a number");
    return std::stoi(text.substr(start, pos - start));
  }

  int superscript() {
    skip_ws();
    if (!consume("^")) fail("expected '^'");
    return number();
  }

  // Collects (node, parent, kind); parent filled by the caller.
  struct NodeRec {
    int number;
    NodeKind kind;
  };

  // Parses one node, records its children edges into `edges`, returns its number.
  int node(std::map<int, NodeKind>& kinds, std::vector<std::pair<int, int>>& edges) {
    skip_ws();
    if (consume("γ") || consume("g")) {
      const int id = superscript();
      kinds.emplace(id, NodeKind::Root);
      return id;
    }
    if (consume("τ") || consume("t")) {
      NodeKind kind = NodeKind::Stochastic;
      if (consume("_0")) kind = NodeKind::Deterministic;
      else if (consume("_{j")) {
        number();  // slot name, renormalized later
        if (!consume("}")) fail("expected '}'");
      } else {
        kind = NodeKind::Deterministic;  // bare "τ^k"
      }
      const int id = superscript();
      kinds.emplace(id, kind);
      return id;
    }
    char open = 0;
    if (consume("(")) open = '(';
    else if (consume("[")) open = '[';
    else if (consume("{")) open = '{';
    else fail("expected a node");
    std::vector<int> kids;
    for (;;) {
      kids.push_back(node(kinds, edges));
      skip_ws();
      if (consume(",")) continue;
      break;
    }
    const std::string close = open == '(' ? ")" : open == '[' ? "]" : "}";
    if (!consume(close)) fail("expected '" + close + "'");
    NodeKind kind = open == '(' ? NodeKind::Root : open == '[' ? NodeKind::Deterministic : NodeKind::Stochastic;
    if (open == '{') {
      if (!consume("_{j")) fail("expected '_{j'");
      number();
      if (!consume("}")) fail("expected '}'");
    }
    const int id = superscript();
    kinds.emplace(id, kind);
    for (int k : kids) edges.emplace_back(k, id);
    return id;
  }
};

}  // namespace

std::string bracket_string(const LabelledTree& tree) {
  std::string out;
  append_node(tree, 1, out);
  return out;
}

LabelledTree parse_bracket(const std::string& text) {
  BracketParser parser(text);
  std::map<int, NodeKind> kinds;
  std::vector<std::pair<int, int>> edges;  // (child, parent)
  const int root = parser.node(kinds, edges);
  parser.skip_ws();
  if (parser.pos != text.size()) parser.fail("trailing input");
  if (root != 1) throw std::invalid_argument("parse_bracket: the root must be node 1");
  const int l = static_cast<int>(kinds.size());
  std::vector<NodeKind> kind_vec(l);
  for (int node = 1; node <= l; ++node) {
    auto it = kinds.find(node);
    if (it == kinds.end()) throw std::invalid_argument("parse_bracket: node numbers must be 1..l");
    kind_vec[node - 1] = it->second;
  }
  std::vector<int> parents(l - 1, 0);
  for (auto [child, parent] : edges) {
    if (child < 2 || child > l) throw std::invalid_argument("parse_bracket: bad child number");
    parents[child - 2] = parent;
  }
  return LabelledTree(std::move(parents), std::move(kind_vec));
}

std::uint64_t level_count(int nodes) {
  if (nodes < 1) return 0;
  std::uint64_t c = 1;
  for (int i = 2; i <= nodes; ++i) c *= 2 * static_cast<std::uint64_t>(i - 1);
  return c;
}

namespace {

void enumerate_level(int l, const std::function<void(const LabelledTree&)>& fn) {
  if (l == 1) {
    fn(LabelledTree());
    return;
  }
  std::vector<int> parents(l - 1, 1);
  std::vector<NodeKind> kinds(l, NodeKind::Deterministic);
  kinds[0] = NodeKind::Root;
  // Lexicographic: parent vector outer (node 2 most significant), label word
  // inner with Deterministic < Stochastic.
  for (;;) {
    for (;;) {
      fn(LabelledTree(parents, kinds));
      int i = l - 1;
      for (; i >= 1; --i) {
        if (kinds[i] == NodeKind::Deterministic) {
          kinds[i] = NodeKind::Stochastic;
          std::fill(kinds.begin() + i + 1, kinds.end(), NodeKind::Deterministic);
          break;
        }
      }
      if (i == 0) break;
    }
    std::fill(kinds.begin() + 1, kinds.end(), NodeKind::Deterministic);
    int i = l - 2;
    for (; i >= 0; --i) {
      if (parents[i] < i + 1) {  // node i+2 may attach to 1..i+1
        ++parents[i];
        std::fill(parents.begin() + i + 1, parents.end(), 1);
        break;
      }
    }
    if (i < 0) break;
  }
}

}  // namespace

void for_each_tree(int max_nodes, const std::function<void(const LabelledTree&)>& fn,
                   const EnumerationLimits& limits) {
  if (max_nodes < 1) throw std::invalid_argument("for_each_tree: max_nodes must be >= 1");
  if (max_nodes > limits.node_cap)
    throw std::length_error("for_each_tree: level " + std::to_string(max_nodes) + " exceeds the configured cap " +
                            std::to_string(limits.node_cap) + " ((l-1)!*2^(l-1) trees per level)");
  for (int l = 1; l <= max_nodes; ++l) enumerate_level(l, fn);
}

std::vector<LabelledTree> enumerate_lts(int max_nodes, const EnumerationLimits& limits) {
  std::vector<LabelledTree> out;
  for_each_tree(max_nodes, [&](const LabelledTree& t) { out.push_back(t); }, limits);
  return out;
}

}  // namespace fracdev::trees
