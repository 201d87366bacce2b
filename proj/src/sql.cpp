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

#include "tablequery/sql.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

namespace tq {

std::string_view aggregator_name(Aggregator agg) {
  switch (agg) {
    case Aggregator::kMin: return "MIN";
    case Aggregator::kMax: return "MAX";
    case Aggregator::kSum: return "SUM";
    case Aggregator::kAvg: return "AVG";
    case Aggregator::kCount: return "COUNT";
  }
  return "?";
}

std::optional<Aggregator> parse_aggregator(std::string_view name) {
  const std::string n = to_lower(name);
  if (n == "min") return Aggregator::kMin;
  if (n == "max") return Aggregator::kMax;
  if (n == "sum") return Aggregator::kSum;
  if (n == "avg") return Aggregator::kAvg;
  if (n == "count") return Aggregator::kCount;
  return std::nullopt;
}

std::string_view compare_op_text(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kGt: return ">";
    case CompareOp::kLt: return "<";
    case CompareOp::kGe: return ">=";
    case CompareOp::kLe: return "<=";
  }
  return "?";
}

bool SqlQuery::is_aggregated() const {
  if (!group_by.empty()) return true;
  return std::any_of(select.begin(), select.end(), [](const SelectItem& s) { return s.agg.has_value(); });
}

WhereClause cnf_and(const WhereClause& a, const WhereClause& b) {
  WhereClause out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

WhereClause cnf_or(const WhereClause& a, const WhereClause& b) {
  // An empty clause is TRUE, and TRUE OR x is TRUE.
  if (a.empty() || b.empty()) return {};
  WhereClause out;
  out.reserve(a.size() * b.size());
  for (const Disjunction& x : a) {
    for (const Disjunction& y : b) {
      Disjunction d = x;
      d.insert(d.end(), y.begin(), y.end());
      out.push_back(std::move(d));
    }
  }
  return out;
}

namespace {

bool contains_name(const std::vector<std::string>& names, const std::string& n) {
  const std::string key = normalize_text(n);
  return std::any_of(names.begin(), names.end(), [&](const std::string& x) { return normalize_text(x) == key; });
}

const Column& require_column(const Table& t, const std::string& name, std::string_view clause) {
  auto idx = t.column_index(name);
  if (!idx) {
    throw ValidationError(std::string(clause) + " references unknown column '" + name + "' of table '" + t.name() +
                          "'");
  }
  return t.column(*idx);
}

void check_aggregator(const Column& c, Aggregator agg) {
  if (agg != Aggregator::kCount && c.type != ColumnType::kNum) {
    throw ValidationError(std::string(aggregator_name(agg)) + " is not legal on " + std::string(to_string(c.type)) +
                          " column '" + c.name + "'; only COUNT is");
  }
}

void check_literal(const Column& c, CompareOp op, const Value& lit) {
  if (op != CompareOp::kEq && c.type == ColumnType::kStr) {
    throw ValidationError("comparison " + std::string(compare_op_text(op)) + " on str column '" + c.name + "'");
  }
  bool ok = false;
  switch (c.type) {
    case ColumnType::kStr: ok = std::holds_alternative<std::string>(lit); break;
    case ColumnType::kNum: ok = std::holds_alternative<double>(lit); break;
    case ColumnType::kDate: ok = std::holds_alternative<Date>(lit); break;
  }
  if (!ok) throw ValidationError("literal '" + value_text(lit) + "' does not match the type of column '" + c.name + "'");
}

}  // namespace

void validate_structure(const SqlQuery& q) {
  if (!q.having.empty() && q.group_by.empty()) {
    throw ValidationError("HAVING requires a non-empty GROUP BY");
  }
  for (const Disjunction& d : q.where) {
    if (d.empty()) throw ValidationError("WHERE contains an empty OR-group");
  }
  const bool aggregated = q.is_aggregated();
  if (!q.group_by.empty()) {
    for (const SelectItem& s : q.select) {
      if (!s.agg && !contains_name(q.group_by, s.column)) {
        throw ValidationError("select column '" + s.column + "' is neither grouped nor aggregated");
      }
    }
    if (q.select.empty()) throw ValidationError("SELECT * is not allowed with GROUP BY");
  } else if (aggregated) {
    for (const SelectItem& s : q.select) {
      if (!s.agg) throw ValidationError("select column '" + s.column + "' mixes with aggregates without GROUP BY");
    }
  }
  if (q.superlative) {
    const Superlative& sup = *q.superlative;
    if (sup.limit < 1) throw ValidationError("superlative LIMIT must be positive");
    if (aggregated && !sup.agg && !contains_name(q.group_by, sup.column)) {
      throw ValidationError("ORDER BY column '" + sup.column + "' must be grouped or aggregated");
    }
    if (!aggregated && sup.agg) throw ValidationError("aggregated ORDER BY in a non-aggregated query");
  }
}

void validate(const SqlQuery& q, const Table& t) {
  validate_structure(q);
  for (const SelectItem& s : q.select) {
    const Column& c = require_column(t, s.column, "SELECT");
    if (s.agg) check_aggregator(c, *s.agg);
  }
  for (const Disjunction& d : q.where) {
    for (const Condition& cond : d) check_literal(require_column(t, cond.column, "WHERE"), cond.op, cond.literal);
  }
  for (const std::string& g : q.group_by) require_column(t, g, "GROUP BY");
  for (const HavingCondition& h : q.having) {
    const Column& c = require_column(t, h.column, "HAVING");
    check_aggregator(c, h.agg);
    if (!std::holds_alternative<double>(h.literal)) throw ValidationError("HAVING literal must be numeric");
  }
  if (q.superlative) {
    const Column& c = require_column(t, q.superlative->column, "ORDER BY");
    if (q.superlative->agg) check_aggregator(c, *q.superlative->agg);
  }
}

// ---------------------------------------------------------------------------
// Rendering.

namespace {

constexpr std::array<std::string_view, 20> kKeywords = {
    "select", "from", "where", "and", "or",  "group", "by",  "having", "order", "asc",
    "desc",   "limit", "min",  "max", "sum", "avg",   "count", "not",  "null",  "date"};

bool is_keyword(std::string_view word) {
  const std::string w = to_lower(word);
  return std::find(kKeywords.begin(), kKeywords.end(), w) != kKeywords.end();
}

}  // namespace

std::string render_identifier(std::string_view name) {
  bool plain = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') plain = false;
  }
  if (plain && !is_keyword(name)) return std::string(name);
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

namespace {

std::string quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

struct RenderStyle {
  bool canonical = false;
};

std::string ident(std::string_view name, RenderStyle style) {
  return style.canonical ? render_identifier(normalize_text(name)) : render_identifier(name);
}

std::string literal(const Value& v, RenderStyle style) {
  if (std::holds_alternative<std::monostate>(v)) return "NULL";
  if (std::holds_alternative<double>(v)) return format_number(std::get<double>(v));
  if (std::holds_alternative<Date>(v)) return quote(std::get<Date>(v).iso());
  const std::string& s = std::get<std::string>(v);
  return quote(style.canonical ? normalize_text(s) : s);
}

std::string select_item(const SelectItem& s, RenderStyle style) {
  if (!s.agg) return ident(s.column, style);
  return std::string(aggregator_name(*s.agg)) + "(" + ident(s.column, style) + ")";
}

std::string condition(const Condition& c, RenderStyle style) {
  return ident(c.column, style) + " " + std::string(compare_op_text(c.op)) + " " + literal(c.literal, style);
}

std::string having_item(const HavingCondition& h, RenderStyle style) {
  return std::string(aggregator_name(h.agg)) + "(" + ident(h.column, style) + ") " +
         std::string(compare_op_text(h.op)) + " " + literal(h.literal, style);
}

void sort_unique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string render(const SqlQuery& q, std::string_view table_name, RenderStyle style) {
  std::vector<std::string> select;
  for (const SelectItem& s : q.select) select.push_back(select_item(s, style));
  if (style.canonical) std::sort(select.begin(), select.end());

  std::vector<std::string> where;
  for (const Disjunction& d : q.where) {
    std::vector<std::string> terms;
    for (const Condition& c : d) terms.push_back(condition(c, style));
    if (style.canonical) sort_unique(terms);
    where.push_back(terms.size() == 1 ? terms[0] : "(" + join(terms, " OR ") + ")");
  }
  if (style.canonical) sort_unique(where);

  std::vector<std::string> group;
  for (const std::string& g : q.group_by) group.push_back(ident(g, style));
  if (style.canonical) sort_unique(group);

  std::vector<std::string> having;
  for (const HavingCondition& h : q.having) having.push_back(having_item(h, style));
  if (style.canonical) sort_unique(having);

  std::string out = "SELECT ";
  out += select.empty() ? "*" : join(select, ", ");
  if (!style.canonical) {
    out += " FROM ";
    out += render_identifier(table_name);
  }
  if (!where.empty()) out += " WHERE " + join(where, " AND ");
  if (!group.empty()) out += " GROUP BY " + join(group, ", ");
  if (!having.empty()) out += " HAVING " + join(having, " AND ");
  if (q.superlative) {
    const Superlative& sup = *q.superlative;
    out += " ORDER BY ";
    out += select_item(SelectItem{sup.column, sup.agg}, style);
    out += sup.descending ? " DESC" : " ASC";
    out += " LIMIT " + std::to_string(sup.limit);
  }
  return out;
}

}  // namespace

std::string render_literal(const Value& v) { return literal(v, RenderStyle{}); }

std::string render_sql(const SqlQuery& q, std::string_view table_name, SqlDialect) {
  validate_structure(q);
  return render(q, table_name, RenderStyle{});
}

CanonicalSql canonicalize(const SqlQuery& q) {
  validate_structure(q);
  return CanonicalSql{render(q, "", RenderStyle{true})};
}

// ---------------------------------------------------------------------------
// Parsing.

namespace {

struct SqlToken {
  enum class Kind { kWord, kIdent, kString, kNumber, kSymbol, kEnd };
  Kind kind;
  std::string text;
};

std::vector<SqlToken> lex(std::string_view s) {
  std::vector<SqlToken> out;
  size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '\'' || c == '"') {
      const char q = c;
      std::string text;
      ++i;
      bool closed = false;
      while (i < s.size()) {
        if (s[i] == q) {
          if (i + 1 < s.size() && s[i + 1] == q) {
            text.push_back(q);
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        text.push_back(s[i++]);
      }
      if (!closed) throw SqlSyntaxError("unterminated quote in SQL");
      out.push_back({q == '\'' ? SqlToken::Kind::kString : SqlToken::Kind::kIdent, std::move(text)});
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               ((c == '-' || c == '.') && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      size_t j = i + 1;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.' || s[j] == 'e' ||
                              s[j] == 'E' || ((s[j] == '-' || s[j] == '+') && (s[j - 1] == 'e' || s[j - 1] == 'E')))) {
        ++j;
      }
      out.push_back({SqlToken::Kind::kNumber, std::string(s.substr(i, j - i))});
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i + 1;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({SqlToken::Kind::kWord, std::string(s.substr(i, j - i))});
      i = j;
    } else if (c == '>' || c == '<') {
      if (i + 1 < s.size() && s[i + 1] == '=') {
        out.push_back({SqlToken::Kind::kSymbol, std::string(s.substr(i, 2))});
        i += 2;
      } else {
        out.push_back({SqlToken::Kind::kSymbol, std::string(1, c)});
        ++i;
      }
    } else if (c == '=' || c == '(' || c == ')' || c == ',' || c == '*' || c == ';') {
      out.push_back({SqlToken::Kind::kSymbol, std::string(1, c)});
      ++i;
    } else {
      throw SqlSyntaxError(std::string("unexpected character '") + c + "' in SQL");
    }
  }
  out.push_back({SqlToken::Kind::kEnd, ""});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<SqlToken> tokens) : toks_(std::move(tokens)) {}

  SqlQuery parse() {
    SqlQuery q;
    expect_word("select");
    if (accept_symbol("*")) {
      // SELECT *
    } else {
      do {
        q.select.push_back(parse_select_item());
      } while (accept_symbol(","));
    }
    expect_word("from");
    parse_name();
    if (accept_word("where")) q.where = parse_or();
    if (accept_word("group")) {
      expect_word("by");
      do {
        q.group_by.push_back(parse_name());
      } while (accept_symbol(","));
    }
    if (accept_word("having")) {
      do {
        q.having.push_back(parse_having());
      } while (accept_word("and"));
    }
    if (accept_word("order")) {
      expect_word("by");
      SelectItem key = parse_select_item();
      Superlative sup{key.column, key.agg, true, 1};
      if (accept_word("asc")) {
        sup.descending = false;
      } else {
        accept_word("desc");
      }
      expect_word("limit");
      const SqlToken& t = next();
      if (t.kind != SqlToken::Kind::kNumber) throw SqlSyntaxError("LIMIT expects a number");
      sup.limit = std::stoi(t.text);
      q.superlative = sup;
    }
    accept_symbol(";");
    if (peek().kind != SqlToken::Kind::kEnd) throw SqlSyntaxError("unexpected trailing '" + peek().text + "'");
    return q;
  }

 private:
  const SqlToken& peek() const { return toks_[pos_]; }
  const SqlToken& next() {
    const SqlToken& t = toks_[pos_];
    if (t.kind != SqlToken::Kind::kEnd) ++pos_;
    return t;
  }
  bool is_word(const SqlToken& t, std::string_view w) const {
    return t.kind == SqlToken::Kind::kWord && to_lower(t.text) == w;
  }
  bool accept_word(std::string_view w) {
    if (is_word(peek(), w)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_word(std::string_view w) {
    if (!accept_word(w)) throw SqlSyntaxError("expected " + to_upper(w) + " near '" + peek().text + "'");
  }
  bool accept_symbol(std::string_view s) {
    if (peek().kind == SqlToken::Kind::kSymbol && peek().text == s) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) throw SqlSyntaxError("expected '" + std::string(s) + "' near '" + peek().text + "'");
  }
  static std::string to_upper(std::string_view w) {
    std::string out(w);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
  }

  std::string parse_name() {
    const SqlToken& t = next();
    if (t.kind == SqlToken::Kind::kIdent || t.kind == SqlToken::Kind::kWord) return t.text;
    throw SqlSyntaxError("expected a column name near '" + t.text + "'");
  }

  SelectItem parse_select_item() {
    const SqlToken& t = peek();
    if (t.kind == SqlToken::Kind::kWord && toks_[pos_ + 1].kind == SqlToken::Kind::kSymbol &&
        toks_[pos_ + 1].text == "(") {
      auto agg = parse_aggregator(t.text);
      if (!agg) throw SqlSyntaxError("unknown aggregate '" + t.text + "'");
      pos_ += 2;
      std::string col = parse_name();
      expect_symbol(")");
      return {col, agg};
    }
    return {parse_name(), std::nullopt};
  }

  CompareOp parse_op() {
    const SqlToken& t = next();
    if (t.kind == SqlToken::Kind::kSymbol) {
      if (t.text == "=") return CompareOp::kEq;
      if (t.text == ">") return CompareOp::kGt;
      if (t.text == "<") return CompareOp::kLt;
      if (t.text == ">=") return CompareOp::kGe;
      if (t.text == "<=") return CompareOp::kLe;
    }
    throw SqlSyntaxError("expected a comparison operator near '" + t.text + "'");
  }

  Value parse_literal() {
    const SqlToken& t = next();
    if (t.kind == SqlToken::Kind::kString) return t.text;
    if (t.kind == SqlToken::Kind::kNumber) {
      auto n = parse_number(t.text);
      if (!n) {
        try {
          return std::stod(t.text);
        } catch (const std::exception&) {
          throw SqlSyntaxError("bad number '" + t.text + "'");
        }
      }
      return *n;
    }
    if (is_word(t, "null")) return std::monostate{};
    throw SqlSyntaxError("expected a literal near '" + t.text + "'");
  }

  WhereClause parse_or() {
    WhereClause acc = parse_and();
    while (accept_word("or")) acc = cnf_or(acc, parse_and());
    return acc;
  }

  WhereClause parse_and() {
    WhereClause acc = parse_atom();
    while (accept_word("and")) acc = cnf_and(acc, parse_atom());
    return acc;
  }

  WhereClause parse_atom() {
    if (accept_symbol("(")) {
      WhereClause inner = parse_or();
      expect_symbol(")");
      return inner;
    }
    Condition c;
    c.column = parse_name();
    c.op = parse_op();
    c.literal = parse_literal();
    return WhereClause{Disjunction{std::move(c)}};
  }

  HavingCondition parse_having() {
    SelectItem key = parse_select_item();
    if (!key.agg) throw SqlSyntaxError("HAVING term must be aggregated");
    HavingCondition h;
    h.agg = *key.agg;
    h.column = key.column;
    h.op = parse_op();
    h.literal = parse_literal();
    return h;
  }

  std::vector<SqlToken> toks_;
  size_t pos_ = 0;
};

Value coerce(const Value& v, const Column& c) {
  if (is_null(v)) return v;
  switch (c.type) {
    case ColumnType::kStr:
      if (std::holds_alternative<double>(v)) return format_number(std::get<double>(v));
      if (std::holds_alternative<Date>(v)) return std::get<Date>(v).iso();
      return v;
    case ColumnType::kNum:
      if (std::holds_alternative<std::string>(v)) {
        if (auto n = parse_number(std::get<std::string>(v))) return *n;
      }
      return v;
    case ColumnType::kDate:
      if (std::holds_alternative<std::string>(v)) {
        if (auto d = Date::parse(std::get<std::string>(v))) return *d;
      }
      if (std::holds_alternative<double>(v)) {
        const double x = std::get<double>(v);
        if (x == static_cast<int>(x) && x >= 1 && x <= 9999) return Date{static_cast<int>(x), 0, 0};
      }
      return v;
  }
  return v;
}

}  // namespace

SqlQuery parse_sql(std::string_view text) { return Parser(lex(text)).parse(); }

SqlQuery bind_to_table(SqlQuery q, const Table& t) {
  auto resolve = [&](std::string& name, std::string_view clause) -> const Column& {
    const Column& c = require_column(t, name, clause);
    name = c.name;
    return c;
  };
  for (SelectItem& s : q.select) resolve(s.column, "SELECT");
  for (Disjunction& d : q.where) {
    for (Condition& c : d) c.literal = coerce(c.literal, resolve(c.column, "WHERE"));
  }
  for (std::string& g : q.group_by) resolve(g, "GROUP BY");
  for (HavingCondition& h : q.having) {
    resolve(h.column, "HAVING");
    if (std::holds_alternative<std::string>(h.literal)) {
      if (auto n = parse_number(std::get<std::string>(h.literal))) h.literal = *n;
    }
  }
  if (q.superlative) resolve(q.superlative->column, "ORDER BY");
  validate(q, t);
  return q;
}

}  // namespace tq
