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

#ifndef TABLEQUERY_VALUE_HPP_
#define TABLEQUERY_VALUE_HPP_

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace tq {

enum class ColumnType : uint8_t { kStr, kNum, kDate };

std::string_view to_string(ColumnType type);
std::optional<ColumnType> parse_column_type(std::string_view text);

// A calendar date with optional month/day. Zero means "unspecified", so a
// bare year such as 2009 is {2009, 0, 0}. The ISO text form is the normal
// form used everywhere a date is printed or compared as text.
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  std::string iso() const;
  static std::optional<Date> parse(std::string_view text);

  auto operator<=>(const Date&) const = default;
};

// Compares only the components that both dates specify, so 2009 equals
// 2009-05-12 and precedes 2010-01-01.
std::strong_ordering compare_date_prefix(const Date& a, const Date& b);

// Cell or literal value. monostate is SQL NULL.
using Value = std::variant<std::monostate, double, std::string, Date>;

bool is_null(const Value& v);

// Shortest round-trip decimal; integral values print without a fraction.
std::string format_number(double x);

// Parses integers, decimals and digit-grouped numbers ("3,000", "1.5").
std::optional<double> parse_number(std::string_view text);

// Display text of a value (no quoting).
std::string value_text(const Value& v);

// Lowercase, trim and collapse inner whitespace.
std::string normalize_text(std::string_view text);

std::string to_lower(std::string_view text);

// Total order over values used for sorting and canonical forms: NULL first,
// then numbers, strings, dates.
bool value_less(const Value& a, const Value& b);
bool value_equal(const Value& a, const Value& b);

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tq

#endif  // TABLEQUERY_VALUE_HPP_
