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
#include <sstream>

#include "support.hpp"
#include "tablequery/abstraction.hpp"

using namespace tq;

namespace {

using SymbolKey = std::tuple<size_t, size_t, std::string>;

// Symbols of an utterance as (char begin, char end, signature).
std::set<SymbolKey> symbols_of(const AbstractedUtterance& u) {
  std::set<SymbolKey> out;
  for (const Token& t : u.tokens) {
    if (t.is_symbol()) out.insert({t.source.begin, t.source.end, t.symbol->signature()});
  }
  return out;
}

bool overlap(const Annotation& a, const Annotation& b) {
  return a.first_piece < b.end_piece && b.first_piece < a.end_piece;
}

// Maximal conflict-free annotation subsets by brute force over all 2^n.
std::set<std::set<SymbolKey>> maximal_subsets(const std::vector<Annotation>& anns) {
  const size_t n = anns.size();
  REQUIRE(n <= 16);
  std::set<std::set<SymbolKey>> out;
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    for (size_t i = 0; i < n && ok; ++i) {
      for (size_t j = i + 1; j < n && ok; ++j) {
        if ((mask >> i & 1) && (mask >> j & 1) && overlap(anns[i], anns[j])) ok = false;
      }
    }
    if (!ok) continue;
    bool maximal = true;
    for (size_t k = 0; k < n && maximal; ++k) {
      if (mask >> k & 1) continue;
      bool fits = true;
      for (size_t i = 0; i < n && fits; ++i) {
        if ((mask >> i & 1) && overlap(anns[i], anns[k])) fits = false;
      }
      if (fits) maximal = false;
    }
    if (!maximal) continue;
    std::set<SymbolKey> s;
    for (size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) s.insert({anns[i].span.begin, anns[i].span.end, anns[i].symbol.signature()});
    }
    out.insert(s);
  }
  return out;
}

const Annotation* find_annotation(const std::vector<Annotation>& anns, std::string_view text, SymbolKind kind) {
  for (const Annotation& a : anns) {
    if (a.text == text && a.symbol.kind == kind) return &a;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("Levenshtein distance and similarity") {
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(levenshtein("", "abc") == 3);
  CHECK(levenshtein("attcks", "attacks") == 1);
  CHECK(edit_similarity("attcks", "attacks") == doctest::Approx(1.0 - 1.0 / 7));
  CHECK(edit_similarity("attcks", "attacks") > kEditThreshold);
  CHECK(edit_similarity("", "") == 1.0);
}

TEST_CASE("lemmatization is idempotent and feeds vocabulary lookup") {
  const Vocabulary& v = tqt::vocab();
  CHECK(v.lookup_common("averages") == "average");
  CHECK_FALSE(v.lookup_common("xyzzy"));
  REQUIRE(v.lookup_common("by"));
  CHECK(v.group_of(*v.lookup_common("by")) == WordGroup::kStopping);
  const Normalizer& n = v.normalizer();
  for (const char* w : {"attacks", "running", "bigger", "largest", "countries", "sales", "posted", "classes"}) {
    const std::string once = n.lemmatize(w);
    CHECK(n.lemmatize(once) == once);
  }
}

TEST_CASE("vocabulary file errors") {
  std::istringstream dup("#stopping\nby\n#operation\nby\n");
  CHECK_THROWS(Vocabulary::parse(dup, english_normalizer()));
  std::istringstream orphan("word\n");
  CHECK_THROWS(Vocabulary::parse(orphan, english_normalizer()));
}

TEST_CASE("literal recognition") {
  auto lits = recognize_literals("sales of BMW which is more than 3000");
  REQUIRE(lits.size() == 1);
  CHECK(lits[0].symbol.kind == SymbolKind::kN);
  CHECK(std::get<double>(*lits[0].symbol.value) == 3000);

  lits = recognize_literals("attacks in 2009");
  std::set<SymbolKind> kinds;
  for (const auto& l : lits) kinds.insert(l.symbol.kind);
  CHECK(kinds == std::set<SymbolKind>{SymbolKind::kN, SymbolKind::kD});
  for (const auto& l : lits) {
    if (l.symbol.kind == SymbolKind::kD) CHECK(std::get<Date>(*l.symbol.value) == Date{2009, 0, 0});
  }

  lits = recognize_literals("posted June 20, 2019");
  REQUIRE(lits.size() == 1);
  CHECK(std::get<Date>(*lits[0].symbol.value) == Date{2019, 6, 20});
  CHECK(recognize_literals("").empty());
}

TEST_CASE("overlapping T and C annotations for 'shark attacks'") {
  const TableContext& ctx = tqt::toy("shark_attacks");
  const auto anns = annotate("shark attacks by country", *ctx.index, tqt::vocab(), {});
  const Annotation* t = find_annotation(anns, "shark attacks", SymbolKind::kT);
  const Annotation* c = find_annotation(anns, "attacks", SymbolKind::kC);
  REQUIRE(t != nullptr);
  REQUIRE(c != nullptr);
  CHECK(overlap(*t, *c));

  const auto us = permute("shark attacks by country", anns, tqt::vocab());
  std::set<std::string> rendered;
  for (const auto& u : us) rendered.insert(u.render());
  CHECK(rendered.count("T by C"));
  CHECK(rendered.count("UNK C by C"));
}

TEST_CASE("edit-distance match for a typo") {
  const TableContext& ctx = tqt::toy("shark_attacks");
  const auto anns = annotate("shark attcks by country", *ctx.index, tqt::vocab(), {});
  const Annotation* c = find_annotation(anns, "attcks", SymbolKind::kC);
  REQUIRE(c != nullptr);
  CHECK(c->match == MatchKind::kEditDistance);
  CHECK(c->score == doctest::Approx(1.0 - 1.0 / 7));
  CHECK(c->symbol.cols == ColumnSet::single(5));
}

TEST_CASE("value and literal annotations bind columns") {
  const TableContext& ctx = tqt::toy("car_sales");
  const auto anns = annotate("sales of BMW which is more than 3000", *ctx.index, tqt::vocab(), {});
  const Annotation* v = find_annotation(anns, "BMW", SymbolKind::kV);
  REQUIRE(v != nullptr);
  CHECK(v->symbol.cols == ColumnSet::single(0));
  const Annotation* n = find_annotation(anns, "3000", SymbolKind::kN);
  REQUIRE(n != nullptr);
  // Bound to exactly the num columns whose value range holds 3000.
  const Table& cars = *ctx.table;
  ColumnSet holding;
  for (int c = 0; c < cars.num_columns(); ++c) {
    if (cars.column(c).type != ColumnType::kNum) continue;
    double lo = 1e300, hi = -1e300;
    for (const auto& row : cars.rows()) {
      if (is_null(row[c])) continue;
      lo = std::min(lo, std::get<double>(row[c]));
      hi = std::max(hi, std::get<double>(row[c]));
    }
    if (lo <= 3000 && 3000 <= hi) holding.insert(c);
  }
  CHECK(n->symbol.cols == holding);
  const auto us = permute("sales of BMW which is more than 3000", anns, tqt::vocab());
  REQUIRE_FALSE(us.empty());
  CHECK(us[0].render() == "C of V which is more than N");
}

TEST_CASE("question without table words yields only literals") {
  const TableContext& ctx = tqt::toy("car_sales");
  const auto anns = annotate("what happened in 1999", *ctx.index, tqt::vocab(), {});
  for (const auto& a : anns) CHECK((a.symbol.kind == SymbolKind::kN || a.symbol.kind == SymbolKind::kD));
  CHECK(annotate("hello there", *ctx.index, tqt::vocab(), {}).empty());
}

TEST_CASE("zero annotations give one utterance of common words and UNK") {
  const auto us = permute("please show everything xyzzy", {}, tqt::vocab());
  REQUIRE(us.size() == 1);
  CHECK(us[0].symbol_positions().empty());
  CHECK(us[0].unknown_count >= 1);
}

TEST_CASE("three pairwise-overlapping annotations give three utterances") {
  const Table& cars = *tqt::toy("car_sales").table;
  std::vector<Annotation> anns;
  for (const SymbolInstance& s : {SymbolInstance::column(cars, 5), SymbolInstance::column(cars, 6),
                                  SymbolInstance::table(cars)}) {
    Annotation a;
    a.span = {6, 11};
    a.first_piece = 1;
    a.end_piece = 2;
    a.symbol = s;
    a.text = "sales";
    anns.push_back(a);
  }
  const auto us = permute("total sales", anns, tqt::vocab());
  CHECK(us.size() == 3);
  std::set<std::set<SymbolKey>> got;
  for (const auto& u : us) got.insert(symbols_of(u));
  CHECK(got == maximal_subsets(anns));
}

TEST_CASE("permute equals brute-force maximal subset enumeration") {
  const std::vector<std::pair<std::string, std::string>> questions = {
      {"shark_attacks", "shark attacks by country"},
      {"shark_attacks", "shark attcks in florida while surfing"},
      {"car_sales", "sales of BMW which is more than 3000"},
      {"car_sales", "total sales by brand in 2016"},
      {"car_sales", "price of X5 and model of SUV"},
      {"jobs", "titles posted June 20 2019 in Chicago"},
      {"jobs", "average salary of google jobs by city"},
  };
  for (const auto& [table, q] : questions) {
    CAPTURE(q);
    const TableContext& ctx = tqt::toy(table);
    const auto anns = annotate(q, *ctx.index, tqt::vocab(), {});
    const auto expected = maximal_subsets(anns);
    const auto us = permute(q, anns, tqt::vocab(), 4096);
    std::set<std::set<SymbolKey>> got;
    for (const auto& u : us) got.insert(symbols_of(u));
    CHECK(us.size() == got.size());
    CHECK(got == expected);
    for (size_t i = 1; i < us.size(); ++i) {
      const bool ordered = us[i - 1].annotation_score > us[i].annotation_score ||
                           (us[i - 1].annotation_score == us[i].annotation_score &&
                            us[i - 1].unknown_count <= us[i].unknown_count);
      CHECK(ordered);
    }
  }
}

TEST_CASE("permute honours its cap") {
  const TableContext& ctx = tqt::toy("car_sales");
  const std::string q = "sales price year model brand category country of BMW Audi Ford";
  const auto anns = annotate(q, *ctx.index, tqt::vocab(), {});
  CHECK(permute(q, anns, tqt::vocab(), 2).size() <= 2);
}

TEST_CASE("synonyms link phrases to table items") {
  const TableContext& ctx = tqt::toy("car_sales");
  std::istringstream in("revenue\tcolumn:Sales\n");
  const SynonymDict syn = SynonymDict::parse(in);
  const auto anns = annotate("revenue by brand", *ctx.index, tqt::vocab(), syn);
  const Annotation* c = find_annotation(anns, "revenue", SymbolKind::kC);
  REQUIRE(c != nullptr);
  CHECK(c->match == MatchKind::kSynonym);
  CHECK(c->symbol.cols == ColumnSet::single(5));
}
