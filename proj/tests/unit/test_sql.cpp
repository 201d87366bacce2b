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

#include "support.hpp"
#include "tablequery/sql.hpp"

using namespace tq;

namespace {

// A near miss: one literal, direction or limit changed where possible.
SqlQuery mutated(tqt::Rng& rng, SqlQuery q) {
  auto bump = [](Value& v) {
    if (auto* d = std::get_if<double>(&v)) {
      *d += 1;
    } else if (auto* s = std::get_if<std::string>(&v)) {
      *s += "x";
    } else if (auto* date = std::get_if<Date>(&v)) {
      date->year += 1;
    }
  };
  if (!q.where.empty()) {
    auto& d = q.where[rng() % q.where.size()];
    bump(d[rng() % d.size()].literal);
  } else if (!q.having.empty()) {
    bump(q.having[rng() % q.having.size()].literal);
  } else if (q.superlative) {
    q.superlative->descending = !q.superlative->descending;
  } else if (!q.select.empty() && q.select[0].agg == Aggregator::kMax) {
    q.select[0].agg = Aggregator::kMin;
  }
  return q;
}

SqlQuery group_by_country() {
  SqlQuery q;
  q.select = {{"Country", std::nullopt}, {"Attacks", Aggregator::kSum}};
  q.group_by = {"Country"};
  return q;
}

}  // namespace

TEST_CASE("canonical matching is an equivalence agreeing with an independent key") {
  tqt::Rng rng(17);
  const Table t = tqt::random_table(rng, "sales");
  std::vector<SqlQuery> pool;
  int equal_pairs = 0, unequal_pairs = 0;
  for (int i = 0; i < 1000; ++i) {
    const SqlQuery a = tqt::random_query(rng, t);
    SqlQuery b = tqt::shuffled(rng, a);
    const int roll = static_cast<int>(rng() % 3);
    if (roll == 1) b = mutated(rng, b);
    if (roll == 2) b = tqt::random_query(rng, t);
    const CanonicalSql ca = canonicalize(a), cb = canonicalize(b);
    const bool same_key = tqt::structural_key(a) == tqt::structural_key(b);
    CAPTURE(ca.text);
    CAPTURE(cb.text);
    CHECK((ca == cb) == same_key);
    CHECK(canonicalize(a) == ca);         // deterministic
    CHECK((cb == ca) == (ca == cb));      // symmetric
    (ca == cb ? equal_pairs : unequal_pairs)++;
    // Canonical text of a canonical-equivalent copy is a fixed point.
    const SqlQuery reparsed = bind_to_table(parse_sql(render_sql(a)), t);
    CHECK(canonicalize(reparsed) == ca);
    pool.push_back(a);
    pool.push_back(b);
  }
  CHECK(equal_pairs > 100);
  CHECK(unequal_pairs > 100);
  // Transitivity over triples of the pool.
  for (int i = 0; i < 2000; ++i) {
    const SqlQuery& x = pool[rng() % pool.size()];
    const SqlQuery y = tqt::shuffled(rng, x);
    const SqlQuery z = tqt::shuffled(rng, y);
    REQUIRE(canonicalize(x) == canonicalize(y));
    REQUIRE(canonicalize(y) == canonicalize(z));
    CHECK(canonicalize(x) == canonicalize(z));
  }
}

TEST_CASE("500 shuffled pairs are all canonical-equal") {
  tqt::Rng rng(23);
  int matched = 0;
  for (int i = 0; i < 500; ++i) {
    const Table t = tqt::random_table(rng, "r" + std::to_string(i % 7));
    const SqlQuery q = tqt::random_query(rng, t);
    matched += canonicalize(q) == canonicalize(tqt::shuffled(rng, q));
  }
  CHECK(matched == 500);
}

TEST_CASE("condition order and casing do not change the canonical form") {
  SqlQuery a;
  a.where = {{{"Country", CompareOp::kEq, std::string("USA")}}, {{"Date", CompareOp::kGt, Date{2019, 6, 20}}}};
  SqlQuery b;
  b.where = {{{"date", CompareOp::kGt, Date{2019, 6, 20}}}, {{"COUNTRY", CompareOp::kEq, std::string("usa")}}};
  CHECK(canonicalize(a) == canonicalize(b));
  b.where[0][0].op = CompareOp::kGe;
  CHECK_FALSE(canonicalize(a) == canonicalize(b));
}

TEST_CASE("fixed rendering templates") {
  CHECK(render_sql(group_by_country()) == "SELECT Country, SUM(Attacks) FROM t GROUP BY Country");
  SqlQuery bare;
  bare.select = {{"c", std::nullopt}};
  CHECK(render_sql(bare) == "SELECT c FROM t");
  CHECK(render_sql(SqlQuery{}) == "SELECT * FROM t");

  SqlQuery full;
  full.select = {{"Model", std::nullopt}};
  full.where = {{{"Brand", CompareOp::kEq, std::string("O'Neil")}, {"Brand", CompareOp::kEq, std::string("BMW")}},
                {{"Sales", CompareOp::kGt, 3000.0}}};
  full.superlative = Superlative{"Price", std::nullopt, false, 1};
  CHECK(render_sql(full, "car sales") ==
        "SELECT Model FROM \"car sales\" WHERE (Brand = 'O''Neil' OR Brand = 'BMW') AND Sales > 3000 "
        "ORDER BY Price ASC LIMIT 1");
  CHECK(render_identifier("count") == "\"count\"");
  CHECK(render_literal(Date{2019, 6, 0}) == "'2019-06'");
}

TEST_CASE("render and parse round-trip through binding") {
  const Table& sharks = *tqt::toy("shark_attacks").table;
  SqlQuery q = group_by_country();
  q.where = {{{"Year", CompareOp::kGe, 2000.0}}};
  q.having = {{Aggregator::kSum, "Attacks", CompareOp::kGt, 3.0}};
  const SqlQuery back = bind_to_table(parse_sql(render_sql(q)), sharks);
  CHECK(render_sql(back) == render_sql(q));
  const SqlQuery lower = bind_to_table(parse_sql("select country, sum(attacks) from t group by country"), sharks);
  CHECK(render_sql(lower) == render_sql(group_by_country()));
}

TEST_CASE("structural and typed validation") {
  const Table& sharks = *tqt::toy("shark_attacks").table;
  SqlQuery q;
  q.having = {{Aggregator::kSum, "Attacks", CompareOp::kGt, 1.0}};
  CHECK_THROWS_AS(validate_structure(q), ValidationError);  // HAVING without GROUP BY
  q = group_by_country();
  q.select.push_back({"State", std::nullopt});
  CHECK_THROWS_AS(validate_structure(q), ValidationError);
  q = SqlQuery{};
  q.group_by = {"Country"};
  CHECK_THROWS_AS(validate_structure(q), ValidationError);  // SELECT * with GROUP BY
  q = SqlQuery{};
  q.select = {{"Country", std::nullopt}};
  q.superlative = Superlative{"Attacks", Aggregator::kSum, true, 1};
  CHECK_THROWS_AS(validate_structure(q), ValidationError);

  q = SqlQuery{};
  q.select = {{"Country", Aggregator::kSum}};
  CHECK_THROWS_AS(validate(q, sharks), ValidationError);
  q.select = {{"Country", Aggregator::kCount}};
  CHECK_NOTHROW(validate(q, sharks));
  q.where = {{{"Country", CompareOp::kGt, std::string("USA")}}};
  CHECK_THROWS_AS(validate(q, sharks), ValidationError);
  q.where = {{{"Attacks", CompareOp::kGt, std::string("many")}}};
  CHECK_THROWS_AS(validate(q, sharks), ValidationError);
  q.where = {{{"Absent", CompareOp::kEq, 1.0}}};
  CHECK_THROWS_AS(validate(q, sharks), ValidationError);
}

TEST_CASE("syntax errors") {
  CHECK_THROWS_AS(parse_sql("SELECT FROM t"), SqlSyntaxError);
  CHECK_THROWS_AS(parse_sql("SELECT a FROM t WHERE a = 'open"), SqlSyntaxError);
  CHECK_THROWS_AS(parse_sql("SELECT a FROM t LIMIT"), SqlSyntaxError);
  CHECK_THROWS_AS(parse_sql("SELECT MEDIAN(a) FROM t"), SqlSyntaxError);
  CHECK_THROWS_AS(parse_sql("SELECT a FROM t extra"), SqlSyntaxError);
}
