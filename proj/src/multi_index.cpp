#include "fracdev/multi_index.hpp"

#include <map>
#include <stdexcept>

namespace fracdev {

int MultiIndex::weight() const {
  int n = 0;
  for (int a : word)
    if (a != 0) ++n;
  return n;
}

std::vector<int> MultiIndex::nonzero_positions() const {
  std::vector<int> out;
  for (int i = 0; i < length(); ++i)
    if (word[i] != 0) out.push_back(i);
  return out;
}

std::vector<int> MultiIndex::positions_of(int letter) const {
  std::vector<int> out;
  for (int i = 0; i < length(); ++i)
    if (word[i] == letter) out.push_back(i);
  return out;
}

MultiIndex MultiIndex::removed(int position) const {
  if (position < 0 || position >= length()) throw std::out_of_range("MultiIndex::removed: bad position");
  std::vector<int> w;
  w.reserve(word.size() - 1);
  for (int i = 0; i < length(); ++i)
    if (i != position) w.push_back(word[i]);
  return MultiIndex(std::move(w));
}

bool MultiIndex::all_zero() const {
  for (int a : word)
    if (a != 0) return false;
  return true;
}

bool MultiIndex::pure_single_letter() const {
  if (word.empty() || word[0] == 0) return false;
  for (int a : word)
    if (a != word[0]) return false;
  return true;
}

MultiIndex MultiIndex::canonical_relabelled() const {
  std::map<int, int> rename;
  std::vector<int> w;
  w.reserve(word.size());
  int next = 1;
  for (int a : word) {
    if (a == 0) {
      w.push_back(0);
      continue;
    }
    auto it = rename.find(a);
    if (it == rename.end()) it = rename.emplace(a, next++).first;
    w.push_back(it->second);
  }
  return MultiIndex(std::move(w));
}

std::string MultiIndex::str() const {
  std::string out;
  for (int i = 0; i < length(); ++i) {
    if (i) out += ',';
    out += std::to_string(word[i]);
  }
  return out;
}

MultiIndex MultiIndex::parse(const std::string& text) {
  std::vector<int> w;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t used = 0;
    int v = std::stoi(text.substr(pos), &used);
    if (v < 0) throw std::invalid_argument("MultiIndex::parse: letters must be >= 0");
    w.push_back(v);
    pos += used;
    if (pos < text.size()) {
      if (text[pos] != ',') throw std::invalid_argument("MultiIndex::parse: expected ','");
      ++pos;
    }
  }
  return MultiIndex(std::move(w));
}

}  // namespace fracdev
