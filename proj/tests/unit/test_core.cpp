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

#include <sstream>

#include "support.hpp"
#include "tablequery/symbol.hpp"

using namespace tq;

TEST_CASE("dates parse at year, month and day precision") {
  CHECK(Date::parse("2019-06-20") == Date{2019, 6, 20});
  CHECK(Date::parse("2019-06") == Date{2019, 6, 0});
  CHECK(Date::parse("2009") == Date{2009, 0, 0});
  CHECK_FALSE(Date::parse("2019-02-30"));
  CHECK_FALSE(Date::parse("2019-13-01"));
  CHECK_FALSE(Date::parse("June"));
  CHECK(Date{2019, 6, 0}.iso() == "2019-06");
}

TEST_CASE("date prefix comparison uses the components both sides specify") {
  CHECK(compare_date_prefix({2009, 0, 0}, {2009, 5, 12}) == std::strong_ordering::equal);
  CHECK(compare_date_prefix({2009, 0, 0}, {2010, 1, 1}) == std::strong_ordering::less);
  CHECK(compare_date_prefix({2019, 6, 21}, {2019, 6, 20}) == std::strong_ordering::greater);
}

TEST_CASE("numbers parse with digit grouping and print without spurious fractions") {
  CHECK(parse_number("3,000") == 3000.0);
  CHECK(parse_number("1.5") == 1.5);
  CHECK(parse_number("-2") == -2.0);
  CHECK_FALSE(parse_number("3,00"));
  CHECK_FALSE(parse_number("abc"));
  CHECK(format_number(30000) == "30000");
  CHECK(format_number(0.1) == "0.1");
  CHECK(parse_number(format_number(1.0 / 3)) == 1.0 / 3);
}

TEST_CASE("value order puts NULL first, then numbers, strings and dates") {
  const Value null, num = 1.0, str = std::string("a"), date = Date{2000, 1, 1};
  CHECK(value_less(null, num));
  CHECK(value_less(num, str));
  CHECK(value_less(str, date));
  CHECK_FALSE(value_less(num, null));
  CHECK(normalize_text("  Hello   World ") == "hello world");
}

TEST_CASE("column sets") {
  ColumnSet s = ColumnSet::single(3) | ColumnSet::single(5);
  CHECK(s.size() == 2);
  CHECK(s.contains(5));
  CHECK(s.first() == 3);
  CHECK(ColumnSet::single(3).subset_of(s));
  CHECK_FALSE(s.subset_of(ColumnSet::single(3)));
  CHECK(s.indices() == std::vector<int>{3, 5});
  CHECK(ColumnSet::all(64).size() == 64);
}

TEST_CASE("typed CSV round-trips") {
  const Table& cars = *tqt::toy("car_sales").table;
  std::ostringstream out;
  cars.write_csv(out);
  std::istringstream in(out.str());
  const Table back = Table::from_csv(in, "car_sales");
  REQUIRE(back.num_columns() == cars.num_columns());
  REQUIRE(back.rows().size() == cars.rows().size());
  for (size_t r = 0; r < cars.rows().size(); ++r) {
    for (int c = 0; c < cars.num_columns(); ++c) CHECK(value_equal(back.rows()[r][c], cars.rows()[r][c]));
  }
  CHECK(back.column_index(" BRAND ") == 0);
}

TEST_CASE("CSV fields with quotes, commas and newlines") {
  std::istringstream in("Name,Note\nstr,str\n\"a, b\",\"say \"\"hi\"\"\"\nc,\"two\nlines\"\n");
  const Table t = Table::from_csv(in, "q");
  REQUIRE(t.rows().size() == 2);
  CHECK(std::get<std::string>(t.rows()[0][0]) == "a, b");
  CHECK(std::get<std::string>(t.rows()[0][1]) == "say \"hi\"");
  CHECK(std::get<std::string>(t.rows()[1][1]) == "two\nlines");
  CHECK(csv_escape("a,b") == "\"a,b\"");
}

TEST_CASE("table construction rejects malformed input") {
  CHECK_THROWS_AS(Table("t", {{"A", ColumnType::kStr}, {" a", ColumnType::kNum}}, {}), ValidationError);
  CHECK_THROWS_AS(Table("t", {{"A", ColumnType::kNum}}, {{std::string("x")}}), ValidationError);
  CHECK_THROWS_AS(Table("t", {{"A", ColumnType::kNum}}, {{1.0, 2.0}}), ValidationError);
  std::istringstream bad_type("A\ninteger\n1\n");
  CHECK_THROWS_AS(Table::from_csv(bad_type, "t"), ValidationError);
  std::istringstream bad_cell("A\nnum\nabc\n");
  CHECK_THROWS_AS(Table::from_csv(bad_cell, "t"), ValidationError);
  CHECK(is_null(Table::parse_cell("", ColumnType::kNum)));
}

TEST_CASE("symbol property rules") {
  const Table& cars = *tqt::toy("car_sales").table;
  CHECK_NOTHROW(validate_symbol(SymbolInstance::column(cars, 5), cars));
  SymbolInstance c = SymbolInstance::column(cars, 5);
  c.type = ColumnType::kStr;
  CHECK_THROWS_AS(validate_symbol(c, cars), ValidationError);
  SymbolInstance v;
  v.kind = SymbolKind::kV;
  v.cols = ColumnSet::single(0);
  CHECK_THROWS_AS(validate_symbol(v, cars), ValidationError);  // no value
  v.value = std::string("BMW");
  CHECK_NOTHROW(validate_symbol(v, cars));
  v.cols = ColumnSet::single(20);
  CHECK_THROWS_AS(validate_symbol(v, cars), ValidationError);
  CHECK(SymbolInstance::column(cars, 5).signature() == "C{5}:num");
  CHECK(kind_from_letter('G') == SymbolKind::kG);
  CHECK_FALSE(kind_from_letter('Z'));
}
