// Copyright 2026 The TableQuery Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <set>

#include "support.hpp"
#include "tablequery/chart.hpp"

using namespace tq;

namespace {

std::set<std::string> chart_trees(const AbstractedUtterance& u, ParseLimits limits = {}) {
  std::set<std::string> out;
  for (const Derivation& d : parse_all(u, limits).trees) out.insert(tqt::tree_text(*d.root));
  return out;
}

AbstractedUtterance utterance(std::initializer_list<std::pair<std::string, std::optional<SymbolInstance>>> parts) {
  AbstractedUtterance u;
  size_t off = 0;
  for (const auto& [word, sym] : parts) {
    const CharSpan span{off, off + word.size()};
    off += word.size() + 1;
    u.tokens.push_back(sym ? Token::of_symbol(*sym, word, span) : Token::common(word, span));
  }
  return u;
}

// +1 on the nodes of a designated tree, -0.5 on every other node.
class DesignatedScorer : public Scorer {
 public:
  explicit DesignatedScorer(const Derivation& d) {
    d.visit([&](const DerivationNode& n) {
      if (!n.is_leaf()) nodes_.insert({static_cast<int>(n.rule), static_cast<int>(n.predicate), n.span.start, n.span.end});
    });
  }
  std::unique_ptr<NodeScorer> bind(const AbstractedUtterance&) const override {
    struct S : NodeScorer {
      const std::set<std::tuple<int, int, int, int>>* nodes;
      double score(RuleId r, Predicate p, Span s) override {
        return nodes->count({static_cast<int>(r), static_cast<int>(p), s.start, s.end}) ? 1.0 : -0.5;
      }
    };
    auto s = std::make_unique<S>();
    s->nodes = &nodes_;
    return s;
  }
  size_t size() const { return nodes_.size(); }

 private:
  std::set<std::tuple<int, int, int, int>> nodes_;
};

}  // namespace

TEST_CASE("parse_all equals brute-force enumeration on random utterances") {
  tqt::Rng rng(2024);
  const std::vector<std::string> names = {"car_sales", "jobs", "shark_attacks"};
  int checked = 0, attempts = 0;
  while (checked < 60) {
    REQUIRE(++attempts < 2000);
    const TableContext& ctx = tqt::toy(names[attempts % names.size()]);
    const AbstractedUtterance u = tqt::random_utterance(rng, ctx, 6);
    const Chart chart(u);
    if (chart.tree_count() > ParseLimits{}.max_trees) continue;
    const auto oracle = tqt::brute_force_trees(u);
    if (!oracle) continue;
    std::set<std::string> got;
    if (chart.tree_count() > 0) got = chart_trees(u);
    CAPTURE(u.render());
    CHECK(got == *oracle);
    CHECK(chart.tree_count() == oracle->size());
    ++checked;
  }
}

TEST_CASE("parse_best equals the best enumerated score") {
  tqt::Rng rng(99);
  const TableContext& ctx = tqt::toy("car_sales");
  int checked = 0;
  for (int i = 0; i < 400 && checked < 60; ++i) {
    const AbstractedUtterance u = tqt::random_utterance(rng, ctx, 6);
    const Chart chart(u);
    if (chart.tree_count() == 0 || chart.tree_count() > 5000) continue;
    const tqt::HashScorer scorer(i);
    const ParseBestResult best = parse_best(u, scorer);
    auto bound = scorer.bind(u);
    double top = -1e300;
    for (const Derivation& d : parse_all(u).trees) top = std::max(top, derivation_score(d, *bound));
    CHECK(best.score == doctest::Approx(top).epsilon(1e-12));
    CHECK(derivation_score(best.derivation, *bound) == doctest::Approx(best.score).epsilon(1e-12));
    ++checked;
  }
  CHECK(checked == 60);
}

TEST_CASE("an oracle scorer recovers its designated tree") {
  tqt::Rng rng(5);
  const TableContext& ctx = tqt::toy("shark_attacks");
  int checked = 0;
  for (int i = 0; i < 300 && checked < 40; ++i) {
    const AbstractedUtterance u = tqt::random_utterance(rng, ctx, 5);
    const Chart chart(u);
    if (chart.tree_count() < 2 || chart.tree_count() > 5000) continue;
    const Derivation target = chart.tree(rng() % chart.tree_count());
    const DesignatedScorer scorer(target);
    const ParseBestResult best = parse_best(u, scorer);
    CHECK(tqt::tree_text(*best.derivation.root) == tqt::tree_text(*target.root));
    CHECK(best.score == static_cast<double>(scorer.size()));
    ++checked;
  }
  CHECK(checked == 40);
}

TEST_CASE("uniform scores give a deterministic tie-break tree") {
  const Table& cars = *tqt::toy("car_sales").table;
  SymbolInstance bmw;
  bmw.kind = SymbolKind::kV;
  bmw.cols = ColumnSet::single(0);
  bmw.value = std::string("BMW");
  const AbstractedUtterance u = utterance({{"sales", SymbolInstance::column(cars, 5)}, {"of", {}}, {"BMW", bmw}});
  const UniformScorer uniform;
  const auto a = parse_best(u, uniform);
  const auto b = parse_best(u, uniform);
  CHECK(a.score == 0.0);
  CHECK(a.derivation.serialize() == b.derivation.serialize());
}

TEST_CASE("'C of V' includes modify over a raised filter") {
  const Table& cars = *tqt::toy("car_sales").table;
  SymbolInstance bmw;
  bmw.kind = SymbolKind::kV;
  bmw.cols = ColumnSet::single(0);
  bmw.value = std::string("BMW");
  const AbstractedUtterance u = utterance({{"sales", SymbolInstance::column(cars, 5)}, {"of", {}}, {"BMW", bmw}});
  const auto all = parse_all(u);
  bool found = false;
  for (const Derivation& d : all.trees) {
    const DerivationNode& r = *d.root;
    if (r.rule == RuleId::kModify && r.children.size() == 2 && r.children[1]->rule == RuleId::kRaiseFilter) {
      found = true;
    }
  }
  CHECK(found);
  CHECK(chart_trees(u) == *tqt::brute_force_trees(u));
}

TEST_CASE("a single T token has exactly one derivation") {
  const Table& cars = *tqt::toy("car_sales").table;
  const AbstractedUtterance u = utterance({{"cars", SymbolInstance::table(cars)}});
  const auto all = parse_all(u);
  REQUIRE(all.trees.size() == 1);
  CHECK(all.trees[0].root->is_leaf());
}

TEST_CASE("parse errors and caps") {
  const AbstractedUtterance none = utterance({{"show", {}}, {"me", {}}});
  try {
    Chart c(none);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::kNothingToParse);
  }
  SymbolInstance n;
  n.kind = SymbolKind::kN;
  n.value = 5.0;
  const AbstractedUtterance only_n = utterance({{"5", n}});
  try {
    parse_all(only_n);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::kNoValidTree);
  }

  const Table& cars = *tqt::toy("car_sales").table;
  const AbstractedUtterance many = utterance({{"sales", SymbolInstance::column(cars, 5)},
                                              {"price", SymbolInstance::column(cars, 6)},
                                              {"year", SymbolInstance::column(cars, 4)},
                                              {"brand", SymbolInstance::column(cars, 0)}});
  const Chart chart(many);
  REQUIRE(chart.tree_count() > 10);
  const auto capped = parse_all(many, ParseLimits{10, 50000});
  CHECK(capped.trees.size() == 10);
  CHECK(capped.truncated);
  CHECK(capped.total == chart.tree_count());
  const Chart tiny(many, ParseLimits{5000, 3});
  CHECK(tiny.item_cap_hit());
  CHECK(tiny.item_count() <= 3);
}

TEST_CASE("surface structure modes") {
  const Table& cars = *tqt::toy("car_sales").table;
  SymbolInstance bmw;
  bmw.kind = SymbolKind::kV;
  bmw.cols = ColumnSet::single(0);
  bmw.value = std::string("BMW");
  // The window around the middle C stops at the flanking C and V.
  const AbstractedUtterance u = utterance({{"show", {}},
                                           {"brand", SymbolInstance::column(cars, 0)},
                                           {"with", {}},
                                           {"total", {}},
                                           {"sales", SymbolInstance::column(cars, 5)},
                                           {"of", {}},
                                           {"BMW", bmw}});
  const auto bi = surface(u, {4, 5}, SurfaceMode::kBidirectional);
  CHECK(bi.tokens == std::vector<std::string>{"with", "total", "C", "of"});
  const auto start = surface(u, {0, 2}, SurfaceMode::kLeft);
  CHECK(start.positions == std::vector<int>{0, 1});
  CHECK(surface(u, {1, 2}, SurfaceMode::kLeft).tokens == std::vector<std::string>{"show", "C"});

  tqt::Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const AbstractedUtterance r = tqt::random_utterance(rng, tqt::toy("jobs"), 4);
    const int n = static_cast<int>(r.tokens.size());
    const int a = static_cast<int>(rng() % n);
    const int b = a + 1 + static_cast<int>(rng() % (n - a));
    const Span s{a, b};
    auto set_of = [&](SurfaceMode m) {
      const auto p = surface(r, s, m).positions;
      return std::set<int>(p.begin(), p.end());
    };
    std::set<int> left = set_of(SurfaceMode::kLeft), right = set_of(SurfaceMode::kRight);
    std::set<int> both = left;
    both.insert(right.begin(), right.end());
    CHECK(both == set_of(SurfaceMode::kBidirectional));
    const std::set<int> inside = set_of(SurfaceMode::kInside);
    CHECK(std::includes(left.begin(), left.end(), inside.begin(), inside.end()));
    CHECK(std::includes(right.begin(), right.end(), inside.begin(), inside.end()));
  }
}
