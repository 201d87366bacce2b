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

#include <sqlite3.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "support.hpp"

namespace tqt {

using tq::Aggregator;
using tq::ColumnType;
using tq::CompareOp;
using tq::SqlQuery;
using tq::Value;

namespace {

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<size_t>(0, v.size() - 1)(rng)];
}

bool chance(Rng& rng, double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }

int between(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::vector<int> typed(const tq::Table& t, std::initializer_list<ColumnType> types) {
  std::vector<int> out;
  for (int c = 0; c < t.num_columns(); ++c) {
    if (std::find(types.begin(), types.end(), t.column(c).type) != types.end()) out.push_back(c);
  }
  return out;
}

bool has_null(const tq::Table& t, int c) {
  return std::any_of(t.rows().begin(), t.rows().end(), [&](const auto& row) { return tq::is_null(row[c]); });
}

Value cell_of(Rng& rng, const tq::Table& t, int c) {
  std::vector<Value> cells;
  for (const auto& row : t.rows()) {
    if (!tq::is_null(row[c])) cells.push_back(row[c]);
  }
  if (!cells.empty()) return pick(rng, cells);
  switch (t.column(c).type) {
    case ColumnType::kStr: return std::string("none");
    case ColumnType::kNum: return 0.0;
    case ColumnType::kDate: return tq::Date{2020, 1, 1};
  }
  return {};
}

tq::Condition random_condition(Rng& rng, const tq::Table& t) {
  const int c = between(rng, 0, t.num_columns() - 1);
  tq::Condition cond;
  cond.column = t.column(c).name;
  cond.literal = cell_of(rng, t, c);
  if (t.column(c).type != ColumnType::kStr) {
    static const std::vector<CompareOp> ops = {CompareOp::kEq, CompareOp::kGt, CompareOp::kLt, CompareOp::kGe,
                                               CompareOp::kLe};
    cond.op = pick(rng, ops);
  }
  return cond;
}

tq::WhereClause random_where(Rng& rng, const tq::Table& t) {
  tq::WhereClause w;
  const int groups = between(rng, 0, 2);
  for (int g = 0; g < groups; ++g) {
    tq::Disjunction d;
    const int terms = chance(rng, 0.7) ? 1 : 2;
    for (int k = 0; k < terms; ++k) d.push_back(random_condition(rng, t));
    w.push_back(std::move(d));
  }
  return w;
}

// An aggregate that is legal on column c; never COUNT when order_safe, since
// counts tie often and a tied LIMIT has no defined answer.
tq::SelectItem random_aggregate(Rng& rng, const tq::Table& t, bool order_safe) {
  const std::vector<int> nums = typed(t, {ColumnType::kNum});
  static const std::vector<Aggregator> numeric = {Aggregator::kMin, Aggregator::kMax, Aggregator::kSum,
                                                  Aggregator::kAvg, Aggregator::kCount};
  if (!nums.empty() && (order_safe || chance(rng, 0.75))) {
    Aggregator agg = pick(rng, numeric);
    if (order_safe && agg == Aggregator::kCount) agg = Aggregator::kSum;
    return {t.column(pick(rng, nums)).name, agg};
  }
  return {t.column(between(rng, 0, t.num_columns() - 1)).name, Aggregator::kCount};
}

SqlQuery attempt(Rng& rng, const tq::Table& t) {
  SqlQuery q;
  q.where = random_where(rng, t);
  const std::vector<int> keys = typed(t, {ColumnType::kStr, ColumnType::kDate});
  std::vector<int> order_cols;
  for (int c : typed(t, {ColumnType::kNum})) {
    if (!has_null(t, c)) order_cols.push_back(c);
  }
  const int shape = between(rng, 0, 3);
  if (shape == 0) {  // plain rows
    if (!chance(rng, 0.15)) {
      std::vector<int> cols(t.num_columns());
      for (int c = 0; c < t.num_columns(); ++c) cols[c] = c;
      std::shuffle(cols.begin(), cols.end(), rng);
      const int n = between(rng, 1, std::min(3, t.num_columns()));
      for (int i = 0; i < n; ++i) q.select.push_back({t.column(cols[i]).name, std::nullopt});
    }
    if (!order_cols.empty() && chance(rng, 0.4)) {
      q.superlative = tq::Superlative{t.column(pick(rng, order_cols)).name, std::nullopt, chance(rng, 0.5),
                                      chance(rng, 0.8) ? 1 : between(rng, 2, 3)};
    }
  } else if (shape == 1) {  // whole-table aggregates
    const int n = between(rng, 1, 2);
    for (int i = 0; i < n; ++i) q.select.push_back(random_aggregate(rng, t, false));
  } else {  // grouped
    if (keys.empty()) return attempt(rng, t);
    const int g = pick(rng, keys);
    q.group_by.push_back(t.column(g).name);
    if (keys.size() > 1 && chance(rng, 0.2)) {
      const int g2 = pick(rng, keys);
      if (g2 != g) q.group_by.push_back(t.column(g2).name);
    }
    for (const std::string& name : q.group_by) {
      if (chance(rng, 0.8)) q.select.push_back({name, std::nullopt});
    }
    const bool ordered = shape == 3;
    const int n = between(rng, 1, 2);
    for (int i = 0; i < n; ++i) q.select.push_back(random_aggregate(rng, t, false));
    const std::vector<int> nums = typed(t, {ColumnType::kNum});
    if (!nums.empty() && chance(rng, 0.4)) {
      const int c = pick(rng, nums);
      static const std::vector<CompareOp> ops = {CompareOp::kGt, CompareOp::kLt, CompareOp::kGe, CompareOp::kLe};
      const Value cell = cell_of(rng, t, c);
      q.having.push_back({chance(rng, 0.5) ? Aggregator::kSum : Aggregator::kMax, t.column(c).name, pick(rng, ops),
                          std::get<double>(cell)});
    }
    if (ordered) {
      const tq::SelectItem by = random_aggregate(rng, t, true);
      q.superlative = tq::Superlative{by.column, by.agg, chance(rng, 0.5), 1};
    }
  }
  return q;
}

std::string key_text(const Value& v) {
  if (std::holds_alternative<std::monostate>(v)) return "null";
  if (std::holds_alternative<double>(v)) {
    std::ostringstream os;
    os.precision(17);
    os << "n:" << std::get<double>(v);
    return os.str();
  }
  if (std::holds_alternative<tq::Date>(v)) {
    const tq::Date& d = std::get<tq::Date>(v);
    return "d:" + std::to_string(d.year) + "/" + std::to_string(d.month) + "/" + std::to_string(d.day);
  }
  return "s:" + tq::normalize_text(std::get<std::string>(v));
}

std::string name_key(const std::string& s) { return tq::normalize_text(s); }

int agg_key(const std::optional<Aggregator>& a) { return a ? static_cast<int>(*a) : -1; }

}  // namespace

SqlQuery random_query(Rng& rng, const tq::Table& t) {
  for (int tries = 0; tries < 1000; ++tries) {
    SqlQuery q = attempt(rng, t);
    try {
      tq::validate(q, t);
      return q;
    } catch (const tq::ValidationError&) {
    }
  }
  throw std::runtime_error("no valid random query for " + t.name());
}

SqlQuery shuffled(Rng& rng, const SqlQuery& q) {
  SqlQuery s = q;
  std::shuffle(s.select.begin(), s.select.end(), rng);
  for (auto& d : s.where) std::shuffle(d.begin(), d.end(), rng);
  std::shuffle(s.where.begin(), s.where.end(), rng);
  std::shuffle(s.group_by.begin(), s.group_by.end(), rng);
  std::shuffle(s.having.begin(), s.having.end(), rng);
  return s;
}

std::string structural_key(const SqlQuery& q) {
  std::multiset<std::pair<std::string, int>> select;
  for (const auto& s : q.select) select.insert({name_key(s.column), agg_key(s.agg)});
  std::set<std::set<std::tuple<std::string, int, std::string>>> where;
  for (const auto& d : q.where) {
    std::set<std::tuple<std::string, int, std::string>> terms;
    for (const auto& c : d) terms.insert({name_key(c.column), static_cast<int>(c.op), key_text(c.literal)});
    where.insert(terms);
  }
  std::set<std::string> group;
  for (const auto& g : q.group_by) group.insert(name_key(g));
  std::set<std::tuple<int, std::string, int, std::string>> having;
  for (const auto& h : q.having) {
    having.insert({static_cast<int>(h.agg), name_key(h.column), static_cast<int>(h.op), key_text(h.literal)});
  }
  std::ostringstream os;
  os << "select";
  for (const auto& [c, a] : select) os << " " << c << "/" << a;
  os << " where";
  for (const auto& d : where) {
    os << " {";
    for (const auto& [c, op, lit] : d) os << c << op << lit << ";";
    os << "}";
  }
  os << " group";
  for (const auto& g : group) os << " " << g;
  os << " having";
  for (const auto& [a, c, op, lit] : having) os << " " << a << c << op << lit;
  if (q.superlative) {
    os << " order " << name_key(q.superlative->column) << "/" << agg_key(q.superlative->agg) << "/"
       << q.superlative->descending << "/" << q.superlative->limit;
  }
  return os.str();
}

tq::Table random_table(Rng& rng, const std::string& name) {
  static const std::vector<std::string> regions = {"North", "South", "East", "West"};
  static const std::vector<std::string> products = {"Apple", "Pear", "Plum", "Fig", "Kiwi", "Lime"};
  std::vector<tq::Column> cols = {{"Region", ColumnType::kStr},  {"Product", ColumnType::kStr},
                                  {"Units", ColumnType::kNum},   {"Revenue", ColumnType::kNum},
                                  {"Discount", ColumnType::kNum}, {"Day", ColumnType::kDate}};
  const int n = between(rng, 6, 25);
  std::set<double> used;
  auto fresh = [&](double scale) {
    for (;;) {
      const double x = std::round(std::uniform_real_distribution<double>(0, scale)(rng) * 100) / 100;
      if (used.insert(x).second) return x;
    }
  };
  std::vector<std::vector<Value>> rows;
  for (int r = 0; r < n; ++r) {
    std::vector<Value> row;
    row.push_back(pick(rng, regions));
    row.push_back(pick(rng, products));
    row.push_back(fresh(500));
    row.push_back(fresh(10000));
    row.push_back(chance(rng, 0.15) ? Value{} : Value(fresh(50)));
    row.push_back(tq::Date{between(rng, 2018, 2020), between(rng, 1, 12), between(rng, 1, 28)});
    rows.push_back(std::move(row));
  }
  return tq::Table(name, std::move(cols), std::move(rows));
}

namespace {

struct Db {
  sqlite3* db = nullptr;
  ~Db() { sqlite3_close(db); }
};

struct Stmt {
  sqlite3_stmt* s = nullptr;
  ~Stmt() { sqlite3_finalize(s); }
};

void check(int rc, sqlite3* db, int ok = SQLITE_OK) {
  if (rc != ok) throw std::runtime_error(std::string("sqlite: ") + sqlite3_errmsg(db));
}

std::string quoted(const std::string& name) { return "\"" + name + "\""; }

}  // namespace

std::vector<std::vector<Value>> sqlite_rows(const tq::Table& t, const std::string& sql) {
  Db db;
  check(sqlite3_open(":memory:", &db.db), db.db);
  std::string create = "CREATE TABLE " + quoted(t.name()) + " (";
  std::string insert = "INSERT INTO " + quoted(t.name()) + " VALUES (";
  for (int c = 0; c < t.num_columns(); ++c) {
    const char* affinity = t.column(c).type == ColumnType::kNum ? "REAL" : "TEXT";
    create += (c ? ", " : "") + quoted(t.column(c).name) + " " + affinity;
    insert += c ? ", ?" : "?";
  }
  check(sqlite3_exec(db.db, (create + ")").c_str(), nullptr, nullptr, nullptr), db.db);
  {
    Stmt ins;
    check(sqlite3_prepare_v2(db.db, (insert + ")").c_str(), -1, &ins.s, nullptr), db.db);
    for (const auto& row : t.rows()) {
      sqlite3_reset(ins.s);
      for (int c = 0; c < t.num_columns(); ++c) {
        const Value& v = row[c];
        if (tq::is_null(v)) {
          sqlite3_bind_null(ins.s, c + 1);
        } else if (std::holds_alternative<double>(v)) {
          sqlite3_bind_double(ins.s, c + 1, std::get<double>(v));
        } else {
          const std::string text =
              std::holds_alternative<tq::Date>(v) ? std::get<tq::Date>(v).iso() : std::get<std::string>(v);
          sqlite3_bind_text(ins.s, c + 1, text.c_str(), -1, SQLITE_TRANSIENT);
        }
      }
      check(sqlite3_step(ins.s), db.db, SQLITE_DONE);
    }
  }
  Stmt q;
  check(sqlite3_prepare_v2(db.db, sql.c_str(), -1, &q.s, nullptr), db.db);
  std::vector<std::vector<Value>> out;
  int rc;
  while ((rc = sqlite3_step(q.s)) == SQLITE_ROW) {
    std::vector<Value> row;
    for (int c = 0; c < sqlite3_column_count(q.s); ++c) {
      switch (sqlite3_column_type(q.s, c)) {
        case SQLITE_NULL: row.emplace_back(); break;
        case SQLITE_INTEGER:
        case SQLITE_FLOAT: row.emplace_back(sqlite3_column_double(q.s, c)); break;
        default:
          row.emplace_back(std::string(reinterpret_cast<const char*>(sqlite3_column_text(q.s, c))));
      }
    }
    out.push_back(std::move(row));
  }
  check(rc, db.db, SQLITE_DONE);
  return out;
}

bool same_rows(std::vector<std::vector<Value>> a, std::vector<std::vector<Value>> b) {
  auto as_text = [](std::vector<std::vector<Value>>& rows) {
    for (auto& row : rows) {
      for (Value& v : row) {
        if (std::holds_alternative<tq::Date>(v)) v = std::get<tq::Date>(v).iso();
      }
    }
    std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
      return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(), tq::value_less);
    });
  };
  as_text(a);
  as_text(b);
  if (a.size() != b.size()) return false;
  for (size_t r = 0; r < a.size(); ++r) {
    if (a[r].size() != b[r].size()) return false;
    for (size_t c = 0; c < a[r].size(); ++c) {
      const Value& x = a[r][c];
      const Value& y = b[r][c];
      if (std::holds_alternative<double>(x) && std::holds_alternative<double>(y)) {
        const double p = std::get<double>(x), q = std::get<double>(y);
        if (std::fabs(p - q) > 1e-9 * std::max({1.0, std::fabs(p), std::fabs(q)})) return false;
      } else if (x != y) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace tqt
