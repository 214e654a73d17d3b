#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "fracdev/labelled_tree.hpp"

using namespace fracdev;
using namespace fracdev::trees;

TEST_CASE("bare root") {
  const auto list = enumerate_lts(1);
  REQUIRE(list.size() == 1);
  CHECK(list[0].node_count() == 1);
  CHECK(bracket_string(list[0]) == "γ^1");
  const auto st = stats(list[0], 0.75);
  CHECK(st.l == 1);
  CHECK(st.d == 0);
  CHECK(st.s == 0);
  CHECK(st.rho == 0.0);
  CHECK(is_stratonovich_class(list[0]));
}

TEST_CASE("census counts per level") {
  REQUIRE(level_count(1) == 1);
  REQUIRE(level_count(2) == 2);
  REQUIRE(level_count(3) == 8);
  REQUIRE(level_count(4) == 48);
  const auto list = enumerate_lts(3);
  CHECK(list.size() == 11);

  std::map<int, long> by_level;
  EnumerationLimits limits;
  for_each_tree(6, [&](const LabelledTree& t) { ++by_level[t.node_count()]; }, limits);
  for (int l = 1; l <= 6; ++l) CHECK(by_level[l] == static_cast<long>(level_count(l)));
}

TEST_CASE("trees are unique and monotone") {
  std::set<std::string> seen;
  for_each_tree(5, [&](const LabelledTree& t) {
    const auto b = bracket_string(t);
    CHECK(seen.insert(b).second);
    for (int node = 2; node <= t.node_count(); ++node) CHECK(t.parent(node) < node);
    // stochastic slots consecutive in increasing node order
    int expected_slot = 0;
    for (int node = 2; node <= t.node_count(); ++node) {
      const auto& lab = t.label(node);
      if (lab.kind == NodeKind::Stochastic) CHECK(lab.slot == ++expected_slot);
    }
    CHECK(t.deterministic_count() + t.stochastic_count() + 1 == t.node_count());
  });
}

TEST_CASE("stats of the worked examples") {
  // (tau_{j1}^2, tau_{j2}^3)^1 with H = 0.75
  const auto t4 = parse_bracket("(τ_{j1}^2, τ_{j2}^3)^1");
  auto st = stats(t4, 0.75);
  CHECK(st.l == 3);
  CHECK(st.d == 0);
  CHECK(st.s == 2);
  CHECK(st.rho == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(is_stratonovich_class(t4));

  const auto t10 = parse_bracket("(τ_0^2, τ_0^3)^1");
  st = stats(t10, 0.75);
  CHECK(st.d == 2);
  CHECK(st.s == 0);
  CHECK(st.rho == 2.0);

  const auto t2 = parse_bracket("(τ_{j1}^2)^1");
  CHECK_FALSE(is_stratonovich_class(t2));
}

TEST_CASE("label words") {
  const auto t3 = parse_bracket("(τ_0^2)^1");
  CHECK(label_word(t3, {}).word == std::vector<int>{0});

  const auto t4 = parse_bracket("(τ_{j1}^2, τ_{j2}^3)^1");
  CHECK(label_word(t4, {1, 1}).word == std::vector<int>({1, 1}));
  CHECK(label_word(t4, {2, 1}).word == std::vector<int>({2, 1}));

  const auto ti = parse_bracket("([τ_{j2}^4]^2, τ_{j1}^3)^1");
  // node 2 deterministic, node 3 slot 1, node 4 slot 2
  CHECK(label_word_template(ti) == std::vector<int>({0, 1, 2}));
  CHECK(label_word(ti, {2, 1}).word == std::vector<int>({0, 2, 1}));
}

TEST_CASE("assignments") {
  const auto t4 = parse_bracket("(τ_{j1}^2, τ_{j2}^3)^1");
  CHECK(all_assignments(t4.stochastic_count(), 2).size() == 4);
  const auto single = all_assignments(0, 3);
  REQUIRE(single.size() == 1);
  CHECK(single[0].empty());
  const auto t5 = parse_bracket("({τ_{j2}^3}_{j1}^2)^1");
  const auto as = all_assignments(t5.stochastic_count(), 1);
  REQUIRE(as.size() == 1);
  CHECK(as[0] == IndexAssignment({1, 1}));
}

TEST_CASE("bracket round trip on every enumerated tree") {
  for_each_tree(5, [&](const LabelledTree& t) {
    CHECK(parse_bracket(bracket_string(t)) == t);
  });
}

TEST_CASE("published bracket strings") {
  const auto ti = parse_bracket("([τ_{j2}^4]^2, τ_{j1}^3)^1");
  CHECK(bracket_string(ti) == "([τ_{j2}^4]^2, τ_{j1}^3)^1");
  const auto tii = parse_bracket("({τ_0^4, τ_{j2}^3}_{j1}^2)^1");
  CHECK(bracket_string(tii) == "({τ_0^4, τ_{j2}^3}_{j1}^2)^1");
}

TEST_CASE("partition property: words cover (d+1)^m") {
  for (int m = 1; m <= 3; ++m) {
    const int d = 2;
    std::set<std::string> words;
    for_each_tree(m + 1, [&](const LabelledTree& t) {
      if (t.node_count() != m + 1) return;
      for (const auto& a : all_assignments(t.stochastic_count(), d)) words.insert(label_word(t, a).str());
    });
    long expected = 1;
    for (int i = 0; i < m; ++i) expected *= d + 1;
    CHECK(static_cast<long>(words.size()) == expected);
  }
}

TEST_CASE("enumeration cap guards the factorial blowup") {
  CHECK_THROWS_AS(enumerate_lts(9), std::length_error);
  EnumerationLimits lim;
  lim.node_cap = 4;
  CHECK_THROWS_AS(enumerate_lts(5, lim), std::length_error);
}

TEST_CASE("invalid trees rejected") {
  CHECK_THROWS(LabelledTree({2}, {NodeKind::Root, NodeKind::Deterministic}));  // parent >= node
  CHECK_THROWS(LabelledTree({1}, {NodeKind::Deterministic, NodeKind::Deterministic}));
  CHECK_THROWS(LabelledTree({1}, {NodeKind::Root, NodeKind::Root}));
  CHECK_THROWS(parse_bracket("(τ_0^3)^1"));   // node numbers must be 1..l
  CHECK_THROWS(parse_bracket("γ^1 junk"));
}
