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

#include "tablequery/value.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace tq {

std::string_view to_string(ColumnType type) {
  switch (type) {
    case ColumnType::kStr: return "str";
    case ColumnType::kNum: return "num";
    case ColumnType::kDate: return "date";
  }
  return "str";
}

std::optional<ColumnType> parse_column_type(std::string_view text) {
  const std::string t = normalize_text(text);
  if (t == "str" || t == "text" || t == "string") return ColumnType::kStr;
  if (t == "num" || t == "real" || t == "number") return ColumnType::kNum;
  if (t == "date") return ColumnType::kDate;
  return std::nullopt;
}

std::string Date::iso() const {
  char buf[32];
  if (month == 0) {
    std::snprintf(buf, sizeof(buf), "%04d", year);
  } else if (day == 0) {
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  } else {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  }
  return buf;
}

namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

int days_in_month(int year, int month) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                31, 31, 30, 31, 30, 31};
  if (month == 2) {
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return kDays[month - 1];
}

}  // namespace

std::optional<Date> Date::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  Date d;
  if (text.size() == 4) {
    if (!parse_int(text, d.year)) return std::nullopt;
    return d;
  }
  if (text.size() == 7 && text[4] == '-') {
    if (!parse_int(text.substr(0, 4), d.year) || !parse_int(text.substr(5, 2), d.month)) return std::nullopt;
    if (d.month < 1 || d.month > 12) return std::nullopt;
    return d;
  }
  if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    if (!parse_int(text.substr(0, 4), d.year) || !parse_int(text.substr(5, 2), d.month) ||
        !parse_int(text.substr(8, 2), d.day)) {
      return std::nullopt;
    }
    if (d.month < 1 || d.month > 12) return std::nullopt;
    if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return std::nullopt;
    return d;
  }
  return std::nullopt;
}

std::strong_ordering compare_date_prefix(const Date& a, const Date& b) {
  if (auto c = a.year <=> b.year; c != 0) return c;
  if (a.month == 0 || b.month == 0) return std::strong_ordering::equal;
  if (auto c = a.month <=> b.month; c != 0) return c;
  if (a.day == 0 || b.day == 0) return std::strong_ordering::equal;
  return a.day <=> b.day;
}

bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

std::string format_number(double x) {
  if (x == 0) return "0";
  if (std::isfinite(x) && std::fabs(x) < 1e15 && std::floor(x) == x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", x);
    return buf;
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  std::string digits;
  digits.reserve(text.size());
  size_t i = 0;
  if (text[0] == '-' || text[0] == '+') {
    if (text[0] == '-') digits.push_back('-');
    i = 1;
  }
  // Digit groups: commas only between groups of exactly three digits.
  size_t group_len = 0;
  bool grouped = false;
  bool seen_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      ++group_len;
      seen_digit = true;
    } else if (c == ',' && !seen_point) {
      if (!seen_digit || (grouped && group_len != 3) || (!grouped && group_len > 3)) return std::nullopt;
      grouped = true;
      group_len = 0;
    } else if (c == '.' && !seen_point) {
      if (grouped && group_len != 3) return std::nullopt;
      seen_point = true;
      grouped = false;
      digits.push_back('.');
      group_len = 0;
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit || (grouped && group_len != 3) || digits.back() == '.') return std::nullopt;
  double out = 0;
  auto res = std::from_chars(digits.data(), digits.data() + digits.size(), out);
  if (res.ec != std::errc() || res.ptr != digits.data() + digits.size()) return std::nullopt;
  return out;
}

std::string value_text(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double x) const { return format_number(x); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(const Date& d) const { return d.iso(); }
  };
  return std::visit(Visitor{}, v);
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

bool value_less(const Value& a, const Value& b) {
  if (a.index() != b.index()) return a.index() < b.index();
  switch (a.index()) {
    case 0: return false;
    case 1: return std::get<double>(a) < std::get<double>(b);
    case 2: return std::get<std::string>(a) < std::get<std::string>(b);
    case 3: return std::get<Date>(a) < std::get<Date>(b);
  }
  return false;
}

bool value_equal(const Value& a, const Value& b) {
  return !value_less(a, b) && !value_less(b, a);
}

}  // namespace tq
