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

#include "tablequery/backend.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace tq {

// ---------------------------------------------------------------------------
// interpret

namespace {

// Partial query built for one subtree.
struct Frag {
  std::vector<SelectItem> select;  // empty with star = SELECT *
  bool star = false;
  std::vector<std::string> group_by;
  WhereClause where;
  std::vector<HavingCondition> having;
  std::optional<Superlative> superlative;
  std::optional<Value> literal;  // V, N, D leaves
};

bool same_item(const SelectItem& a, const SelectItem& b) { return a.column == b.column && a.agg == b.agg; }

void append_unique(std::vector<SelectItem>& out, const std::vector<SelectItem>& add) {
  for (const SelectItem& s : add) {
    if (std::none_of(out.begin(), out.end(), [&](const SelectItem& o) { return same_item(o, s); })) out.push_back(s);
  }
}

void append_unique(std::vector<std::string>& out, const std::vector<std::string>& add) {
  for (const std::string& s : add) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
}

bool aggregated(const Frag& f) {
  return !f.group_by.empty() ||
         std::any_of(f.select.begin(), f.select.end(), [](const SelectItem& s) { return s.agg.has_value(); });
}

std::optional<Aggregator> aggregate_of(const Frag& ctx, const std::string& column) {
  for (const SelectItem& s : ctx.select) {
    if (s.agg && s.column == column) return s.agg;
  }
  return std::nullopt;
}

bool grouped_on(const Frag& ctx, const std::string& column) {
  return std::find(ctx.group_by.begin(), ctx.group_by.end(), column) != ctx.group_by.end();
}

std::vector<std::string> column_names(const Table& t, ColumnSet cols) {
  std::vector<std::string> out;
  for (int c : cols.indices()) out.push_back(t.column(c).name);
  return out;
}

Aggregator aggregator_for(Predicate p) {
  switch (p) {
    case Predicate::kMin: return Aggregator::kMin;
    case Predicate::kMax: return Aggregator::kMax;
    case Predicate::kSum: return Aggregator::kSum;
    case Predicate::kAvg: return Aggregator::kAvg;
    default: return Aggregator::kCount;
  }
}

CompareOp compare_for(Predicate p) {
  switch (p) {
    case Predicate::kMore: return CompareOp::kGt;
    case Predicate::kLess: return CompareOp::kLt;
    case Predicate::kAtLeast: return CompareOp::kGe;
    case Predicate::kAtMost: return CompareOp::kLe;
    default: return CompareOp::kEq;
  }
}

// A number compared with a date column is read as a year.
Value literal_for_column(const Value& v, const Column& c) {
  if (c.type == ColumnType::kDate) {
    if (const double* x = std::get_if<double>(&v)) return Date{static_cast<int>(*x), 0, 0};
  }
  return v;
}

// Re-expresses `items` in the aggregation context `ctx`: a bare column that
// is neither grouped nor selectable takes the aggregate the context applies
// to it.
std::vector<SelectItem> resolve_in_context(const std::vector<SelectItem>& items, const Frag& ctx) {
  if (!aggregated(ctx)) return items;
  std::vector<SelectItem> out;
  for (SelectItem s : items) {
    if (!s.agg && !grouped_on(ctx, s.column)) {
      auto agg = aggregate_of(ctx, s.column);
      if (!agg) continue;
      s.agg = agg;
    }
    append_unique(out, {s});
  }
  return out;
}

std::optional<Superlative> resolve_superlative(std::optional<Superlative> sup, const Frag& ctx) {
  if (!sup || sup->agg || !aggregated(ctx) || grouped_on(ctx, sup->column)) return sup;
  auto agg = aggregate_of(ctx, sup->column);
  if (!agg) return std::nullopt;
  sup->agg = agg;
  return sup;
}

class Interpreter {
 public:
  explicit Interpreter(const Table& t) : t_(t) {}

  Frag walk(const DerivationNode& n) {
    if (n.is_leaf()) return leaf(n);
    if (is_raising(n.rule)) return raise(n, walk(*n.children[0]));
    Frag a = walk(n.first_operand());
    Frag b = walk(n.second_operand());
    return compose(n, std::move(a), std::move(b));
  }

 private:
  Frag leaf(const DerivationNode& n) {
    Frag f;
    const SymbolInstance& s = n.result;
    switch (s.kind) {
      case SymbolKind::kT:
        f.star = true;
        break;
      case SymbolKind::kC:
        for (const std::string& c : column_names(t_, s.cols)) f.select.push_back({c, std::nullopt});
        break;
      case SymbolKind::kV:
      case SymbolKind::kN:
      case SymbolKind::kD:
        f.literal = s.value;
        break;
      default:
        throw InterpretationError("operator symbol as a leaf");
    }
    return f;
  }

  Frag raise(const DerivationNode& n, Frag child) {
    if (n.rule == RuleId::kRaiseFilter) {
      Disjunction any;
      for (int c : n.result.cols.indices()) {
        any.push_back({t_.column(c).name, CompareOp::kEq, literal_for_column(*child.literal, t_.column(c))});
      }
      Frag f;
      f.where = {any};
      return f;
    }
    // C -> A
    Frag f;
    f.where = child.where;
    const Aggregator agg = aggregator_for(n.predicate);
    for (const SelectItem& s : child.select) append_unique(f.select, {{s.column, agg}});
    return f;
  }

  Frag compose(const DerivationNode& n, Frag a, Frag b) {
    switch (n.rule) {
      case RuleId::kProject: {
        Frag out = std::move(b);
        std::vector<SelectItem> items = resolve_in_context(a.select, out);
        append_unique(out.group_by, a.group_by);
        if (!items.empty()) {
          out.select = std::move(items);
          out.star = false;
        }
        out.where = cnf_and(out.where, a.where);
        out.having.insert(out.having.end(), a.having.begin(), a.having.end());
        if (a.superlative) out.superlative = resolve_superlative(a.superlative, out);
        out.superlative = resolve_superlative(out.superlative, out);
        return out;
      }
      case RuleId::kFilter: {
        Frag out = std::move(b);
        for (const Disjunction& d : a.where) add_condition(out, d);
        return out;
      }
      case RuleId::kGroup: {
        Frag out;
        out.group_by = a.group_by;
        std::vector<std::string> cols;
        for (const SelectItem& s : b.select) cols.push_back(s.column);
        append_unique(out.group_by, cols);
        for (const std::string& g : out.group_by) append_unique(out.select, {{g, std::nullopt}});
        for (const SelectItem& s : a.select) {
          if (s.agg) append_unique(out.select, {s});
        }
        out.where = cnf_and(a.where, b.where);
        out.having = a.having;
        return out;
      }
      case RuleId::kEqual:
      case RuleId::kCompare: {
        const std::string& column = a.select.at(0).column;
        const Column& c = t_.column(*t_.column_index(column));
        Frag out;
        out.where = cnf_and(a.where, {{{column, compare_for(n.predicate), literal_for_column(*b.literal, c)}}});
        return out;
      }
      case RuleId::kConjunction: {
        Frag out;
        out.where = n.predicate == Predicate::kOr ? cnf_or(a.where, b.where) : cnf_and(a.where, b.where);
        return out;
      }
      case RuleId::kSuperlative: {
        Frag out = std::move(a);
        const std::string& column = b.select.at(0).column;
        // An aggregate first operand orders by the same aggregate of C2.
        std::optional<Aggregator> agg;
        if (aggregated(out)) agg = out.select.at(0).agg;
        out.superlative = Superlative{column, agg, n.predicate == Predicate::kArgmax, 1};
        out.where = cnf_and(out.where, b.where);
        return out;
      }
      case RuleId::kCombineColumns:
      case RuleId::kCombineAggregates: {
        Frag out = std::move(a);
        append_unique(out.select, b.select);
        out.where = cnf_and(out.where, b.where);
        return out;
      }
      case RuleId::kModify: {
        Frag out = std::move(a);
        out.where = cnf_and(out.where, b.where);
        return out;
      }
      default:
        throw InterpretationError("unexpected rule " + std::string(rule_name(n.rule)));
    }
  }

  // A filter on a column aggregated in a grouped context becomes HAVING
  // when the condition is a single numeric comparison.
  void add_condition(Frag& ctx, const Disjunction& d) {
    if (!ctx.group_by.empty() && d.size() == 1 && !grouped_on(ctx, d[0].column) &&
        std::holds_alternative<double>(d[0].literal)) {
      if (auto agg = aggregate_of(ctx, d[0].column)) {
        const Column& c = t_.column(*t_.column_index(d[0].column));
        if (agg == Aggregator::kCount || c.type == ColumnType::kNum) {
          ctx.having.push_back({*agg, d[0].column, d[0].op, d[0].literal});
          return;
        }
      }
    }
    ctx.where = cnf_and(ctx.where, {d});
  }

  const Table& t_;
};

}  // namespace

SqlQuery interpret(const Derivation& d, const Table& t) {
  if (!d.root) throw InterpretationError("empty derivation");
  Interpreter in(t);
  Frag f = in.walk(*d.root);
  if (f.literal) throw InterpretationError("derivation root is a literal");
  if (f.select.empty() && !f.star) {
    if (!f.where.empty()) {
      f.star = true;  // a bare filter selects whole rows
    } else {
      throw InterpretationError("derivation yields an empty select list");
    }
  }
  SqlQuery q;
  q.select = std::move(f.select);
  q.where = std::move(f.where);
  q.group_by = std::move(f.group_by);
  q.having = std::move(f.having);
  q.superlative = std::move(f.superlative);
  try {
    validate(q, t);
  } catch (const ValidationError& e) {
    throw InterpretationError(std::string("interpreted query is invalid: ") + e.what());
  }
  return q;
}

// ---------------------------------------------------------------------------
// execute

namespace {

int column_of(const Table& t, const std::string& name) {
  auto c = t.column_index(name);
  if (!c) throw ExecutionError("unknown column '" + name + "'");
  return *c;
}

bool holds(std::strong_ordering ord, CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return ord == 0;
    case CompareOp::kGt: return ord > 0;
    case CompareOp::kLt: return ord < 0;
    case CompareOp::kGe: return ord >= 0;
    case CompareOp::kLe: return ord <= 0;
  }
  return false;
}

std::strong_ordering compare_numbers(double a, double b) {
  if (a < b) return std::strong_ordering::less;
  if (a > b) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

bool evaluate(const Value& cell, CompareOp op, const Value& literal, ColumnType type) {
  if (is_null(cell)) return false;
  switch (type) {
    case ColumnType::kStr: {
      if (op != CompareOp::kEq) throw ExecutionError("ordered comparison on a str column");
      const std::string* lit = std::get_if<std::string>(&literal);
      if (lit == nullptr) throw ExecutionError("non-text literal for a str column");
      return normalize_text(std::get<std::string>(cell)) == normalize_text(*lit);
    }
    case ColumnType::kNum: {
      const double* lit = std::get_if<double>(&literal);
      if (lit == nullptr) throw ExecutionError("non-numeric literal for a num column");
      return holds(compare_numbers(std::get<double>(cell), *lit), op);
    }
    case ColumnType::kDate: {
      const Date* lit = std::get_if<Date>(&literal);
      if (lit == nullptr) throw ExecutionError("non-date literal for a date column");
      return holds(compare_date_prefix(std::get<Date>(cell), *lit), op);
    }
  }
  return false;
}

Value aggregate(Aggregator agg, const std::vector<const std::vector<Value>*>& rows, int column) {
  size_t n = 0;
  double sum = 0;
  std::optional<Value> best;
  for (const auto* row : rows) {
    const Value& v = (*row)[column];
    if (is_null(v)) continue;
    ++n;
    if (agg == Aggregator::kSum || agg == Aggregator::kAvg) sum += std::get<double>(v);
    if (agg == Aggregator::kMin && (!best || value_less(v, *best))) best = v;
    if (agg == Aggregator::kMax && (!best || value_less(*best, v))) best = v;
  }
  switch (agg) {
    case Aggregator::kCount: return static_cast<double>(n);
    case Aggregator::kSum: return n == 0 ? Value{} : Value{sum};
    case Aggregator::kAvg: return n == 0 ? Value{} : Value{sum / static_cast<double>(n)};
    case Aggregator::kMin:
    case Aggregator::kMax: return best ? *best : Value{};
  }
  return {};
}

std::string header_of(const SelectItem& s) {
  if (!s.agg) return s.column;
  return std::string(aggregator_name(*s.agg)) + "(" + s.column + ")";
}

// NULL sorts before every value, as in common SQL engines.
bool sort_less(const Value& a, const Value& b) { return value_less(a, b); }

}  // namespace

ResultTable execute(const SqlQuery& q, const Table& t) {
  try {
    validate(q, t);
  } catch (const ValidationError& e) {
    throw ExecutionError(e.what());
  }
  std::vector<const std::vector<Value>*> rows;
  for (const auto& row : t.rows()) {
    bool keep = true;
    for (const Disjunction& d : q.where) {
      bool any = false;
      for (const Condition& c : d) {
        const int col = column_of(t, c.column);
        if (evaluate(row[col], c.op, c.literal, t.column(col).type)) {
          any = true;
          break;
        }
      }
      if (!any) {
        keep = false;
        break;
      }
    }
    if (keep) rows.push_back(&row);
  }

  ResultTable out;
  if (q.select.empty()) {
    for (const Column& c : t.columns()) out.headers.push_back(c.name);
  } else {
    for (const SelectItem& s : q.select) out.headers.push_back(header_of(s));
  }

  const bool agg_query = q.is_aggregated() || (q.superlative && q.superlative->agg);
  if (!agg_query) {
    if (q.superlative) {
      const int col = column_of(t, q.superlative->column);
      std::stable_sort(rows.begin(), rows.end(), [&](const auto* a, const auto* b) {
        return q.superlative->descending ? sort_less((*b)[col], (*a)[col]) : sort_less((*a)[col], (*b)[col]);
      });
      if (rows.size() > static_cast<size_t>(q.superlative->limit)) rows.resize(q.superlative->limit);
    }
    for (const auto* row : rows) {
      if (q.select.empty()) {
        out.rows.push_back(*row);
        continue;
      }
      std::vector<Value> r;
      for (const SelectItem& s : q.select) r.push_back((*row)[column_of(t, s.column)]);
      out.rows.push_back(std::move(r));
    }
    return out;
  }

  // Groups in order of first appearance; one group over all rows when the
  // query aggregates without GROUP BY.
  std::vector<int> group_cols;
  for (const std::string& g : q.group_by) group_cols.push_back(column_of(t, g));
  std::vector<std::vector<const std::vector<Value>*>> groups;
  if (group_cols.empty()) {
    groups.push_back(rows);
  } else {
    std::vector<std::vector<Value>> keys;
    for (const auto* row : rows) {
      std::vector<Value> key;
      for (int c : group_cols) key.push_back((*row)[c]);
      size_t g = 0;
      for (; g < keys.size(); ++g) {
        bool same = true;
        for (size_t i = 0; i < key.size() && same; ++i) same = value_equal(keys[g][i], key[i]);
        if (same) break;
      }
      if (g == keys.size()) {
        keys.push_back(key);
        groups.emplace_back();
      }
      groups[g].push_back(row);
    }
  }

  struct GroupRow {
    std::vector<Value> values;
    Value order_key;
  };
  std::vector<GroupRow> result;
  for (const auto& g : groups) {
    bool keep = true;
    for (const HavingCondition& h : q.having) {
      const Value v = aggregate(h.agg, g, column_of(t, h.column));
      if (is_null(v) || !holds(compare_numbers(std::get<double>(v), std::get<double>(h.literal)), h.op)) {
        keep = false;
        break;
      }
    }
    if (!keep) continue;
    GroupRow r;
    for (const SelectItem& s : q.select) {
      const int col = column_of(t, s.column);
      r.values.push_back(s.agg ? aggregate(*s.agg, g, col) : (g.empty() ? Value{} : (*g.front())[col]));
    }
    if (q.superlative) {
      const int col = column_of(t, q.superlative->column);
      r.order_key = q.superlative->agg ? aggregate(*q.superlative->agg, g, col)
                                       : (g.empty() ? Value{} : (*g.front())[col]);
    }
    result.push_back(std::move(r));
  }
  if (q.superlative) {
    std::stable_sort(result.begin(), result.end(), [&](const GroupRow& a, const GroupRow& b) {
      return q.superlative->descending ? sort_less(b.order_key, a.order_key) : sort_less(a.order_key, b.order_key);
    });
    if (result.size() > static_cast<size_t>(q.superlative->limit)) result.resize(q.superlative->limit);
  }
  for (GroupRow& r : result) out.rows.push_back(std::move(r.values));
  return out;
}

namespace {

bool cell_equal(const Value& a, const Value& b) {
  const double* x = std::get_if<double>(&a);
  const double* y = std::get_if<double>(&b);
  if (x != nullptr && y != nullptr) {
    return std::abs(*x - *y) <= 1e-9 * std::max({1.0, std::abs(*x), std::abs(*y)});
  }
  return value_equal(a, b);
}

bool row_less(const std::vector<Value>& a, const std::vector<Value>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), value_less);
}

}  // namespace

bool results_equal(const ResultTable& a, const ResultTable& b) {
  if (a.rows.size() != b.rows.size()) return false;
  auto x = a.rows;
  auto y = b.rows;
  std::sort(x.begin(), x.end(), row_less);
  std::sort(y.begin(), y.end(), row_less);
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != y[i].size()) return false;
    for (size_t j = 0; j < x[i].size(); ++j) {
      if (!cell_equal(x[i][j], y[i][j])) return false;
    }
  }
  return true;
}

std::string result_to_csv(const ResultTable& r) {
  std::ostringstream os;
  for (size_t i = 0; i < r.headers.size(); ++i) os << (i ? "," : "") << csv_escape(r.headers[i]);
  os << "\n";
  for (const auto& row : r.rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(value_text(row[i]));
    os << "\n";
  }
  return os.str();
}

}  // namespace tq
