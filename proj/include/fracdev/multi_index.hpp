#pragma once

#include <string>
#include <vector>

namespace fracdev {

/// Word over the alphabet {0,1,...,d}. Letter 0 stands for integration
/// against time, letters 1..d against the noise components. Position 0 of the
/// word belongs to the innermost (earliest) integration variable.
struct MultiIndex {
  std::vector<int> word;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> w) : word(std::move(w)) {}

  int length() const { return static_cast<int>(word.size()); }

  /// |alpha| = number of nonzero letters.
  int weight() const;

  /// 0-based positions of nonzero letters (the set J_alpha).
  std::vector<int> nonzero_positions() const;

  /// 0-based positions carrying the given letter.
  std::vector<int> positions_of(int letter) const;

  /// Word with the 0-based position removed.
  MultiIndex removed(int position) const;

  bool all_zero() const;

  /// True when the word has no zero letter and a single distinct letter.
  bool pure_single_letter() const;

  /// Nonzero letters renamed by order of first appearance; invariant key for
  /// moment memoization (component relabelling does not change moments).
  MultiIndex canonical_relabelled() const;

  std::string str() const;              // e.g. "1,0,1"
  static MultiIndex parse(const std::string& text);

  bool operator==(const MultiIndex&) const = default;
};

}  // namespace fracdev
