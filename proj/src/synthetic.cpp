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

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "tablequery/harness.hpp"

namespace tq {

namespace {

using Rng = std::mt19937_64;

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  std::uniform_int_distribution<size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

bool chance(double p, Rng& rng) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }

bool year_like(double x) { return x == std::floor(x) && x >= 1900 && x <= 2100; }

// Columns of a table by the role they can play in a template.
struct Roles {
  const TableContext* ctx = nullptr;
  std::vector<int> cats;   // str columns with at least two values
  std::vector<int> nums;   // num columns that are not years
  std::vector<int> dates;  // date columns
  // Per column: values that link to that column only.
  std::map<int, std::vector<const TableIndex::ValueEntry*>> values;
  std::map<int, std::pair<double, double>> range;
};

// Whether the value, written alone, is annotated as itself (values made of
// stopping words only are never linked).
bool linkable(const TableIndex::ValueEntry& v, const TableContext& ctx, const Vocabulary& vocab) {
  for (const Annotation& a : annotate(v.raw, *ctx.index, vocab, ctx.synonyms)) {
    if (a.symbol.kind == SymbolKind::kV && a.match == MatchKind::kExact && a.symbol.cols == v.cols) return true;
  }
  return false;
}

Roles analyze(const TableContext& ctx, const Vocabulary& vocab) {
  Roles r;
  r.ctx = &ctx;
  const Table& t = *ctx.table;
  for (const auto& v : ctx.index->values()) {
    if (v.cols.size() == 1 && linkable(v, ctx, vocab)) r.values[v.cols.first()].push_back(&v);
  }
  for (int c = 0; c < t.num_columns(); ++c) {
    switch (t.column(c).type) {
      case ColumnType::kStr:
        if (r.values[c].size() >= 2) r.cats.push_back(c);
        break;
      case ColumnType::kNum: {
        bool years = true, any = false;
        double lo = 0, hi = 0;
        for (const auto& row : t.rows()) {
          if (const double* x = std::get_if<double>(&row[c])) {
            lo = any ? std::min(lo, *x) : *x;
            hi = any ? std::max(hi, *x) : *x;
            any = true;
            years = years && year_like(*x);
          }
        }
        if (any && !years && hi > lo) {
          r.nums.push_back(c);
          r.range[c] = {lo, hi};
        }
        break;
      }
      case ColumnType::kDate:
        r.dates.push_back(c);
        break;
    }
  }
  return r;
}

std::string plural(const std::string& w) {
  if (w.find(' ') != std::string::npos || w.empty()) return w;
  const char last = w.back();
  if (last == 's') return w;
  if (last == 'x' || w.ends_with("ch") || w.ends_with("sh")) return w + "es";
  if (last == 'y' && w.size() > 1 && std::string("aeiou").find(w[w.size() - 2]) == std::string::npos) {
    return w.substr(0, w.size() - 1) + "ies";
  }
  return w + "s";
}

// Question under construction: literal words and linked phrases, some of
// which may receive a typo.
struct Draft {
  struct Piece {
    std::string text;
    bool typo_ok;
  };
  std::vector<Piece> pieces;
  SqlQuery gold;

  Draft& say(const std::string& s) {
    pieces.push_back({s, false});
    return *this;
  }
  Draft& link(const std::string& s, bool typo_ok = true) {
    pieces.push_back({s, typo_ok});
    return *this;
  }
  std::string text() const {
    std::string out;
    for (const auto& p : pieces) {
      if (p.text.empty()) continue;
      if (!out.empty()) out += ' ';
      out += p.text;
    }
    return out;
  }
};

// Drops one inner letter of a long word, keeping the edit similarity of the
// phrase above the fuzzy-match threshold.
std::optional<std::string> typo(const std::string& phrase, Rng& rng) {
  std::vector<std::pair<size_t, size_t>> words;  // begin, length
  size_t i = 0;
  while (i < phrase.size()) {
    while (i < phrase.size() && phrase[i] == ' ') ++i;
    size_t j = i;
    while (j < phrase.size() && phrase[j] != ' ') ++j;
    bool alpha = j > i;
    for (size_t k = i; k < j; ++k) alpha = alpha && std::isalpha(static_cast<unsigned char>(phrase[k]));
    if (alpha && j - i >= 6) words.emplace_back(i, j - i);
    i = j;
  }
  if (words.empty()) return std::nullopt;
  const auto [begin, len] = pick(words, rng);
  std::uniform_int_distribution<size_t> pos(1, len - 2);
  std::string out = phrase;
  out.erase(begin + pos(rng), 1);
  return out;
}

struct Agg {
  Aggregator agg;
  std::vector<std::string> words;
};

const std::vector<Agg>& numeric_aggs() {
  static const std::vector<Agg> v = {{Aggregator::kSum, {"total", "sum of"}},
                                     {Aggregator::kAvg, {"average", "mean"}},
                                     {Aggregator::kMax, {"maximum", "max"}},
                                     {Aggregator::kMin, {"minimum", "min"}}};
  return v;
}

std::string col_word(const Table& t, int c) { return to_lower(t.column(c).name); }

SelectItem item(const Table& t, int c, std::optional<Aggregator> agg = std::nullopt) {
  return {t.column(c).name, agg};
}

Condition cond(const Table& t, int c, CompareOp op, Value v) { return {t.column(c).name, op, std::move(v)}; }

int other_than(const std::vector<int>& v, int not_this, Rng& rng) {
  std::vector<int> rest;
  for (int x : v) {
    if (x != not_this) rest.push_back(x);
  }
  return rest.empty() ? -1 : pick(rest, rng);
}

// A round number inside the column's value range.
double threshold(const Roles& r, int c, Rng& rng) {
  const auto [lo, hi] = r.range.at(c);
  const double x = lo + (hi - lo) * std::uniform_real_distribution<double>(0.25, 0.75)(rng);
  const double mag = std::pow(10.0, std::max(0.0, std::floor(std::log10(std::max(1.0, x))) - 1));
  double n = std::floor(x / mag) * mag;
  if (n <= lo) n = std::ceil(x);
  return n;
}

using Template = std::function<std::optional<Draft>(const Roles&, Rng&)>;

// Statistic: an aggregate over the whole table.
std::optional<Draft> statistic(const Roles& r, Rng& rng) {
  const Table& t = *r.ctx->table;
  Draft d;
  if (!r.nums.empty() && chance(0.8, rng)) {
    const int n = pick(r.nums, rng);
    const Agg& a = pick(numeric_aggs(), rng);
    const std::string w = pick(a.words, rng);
    const std::string num = col_word(t, n);
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
      case 0: d.say("please compute " + w).link(num).say("for me"); break;
      case 1: d.say("what is the " + w).link(num); break;
      case 2: d.say("show the " + w).link(num); break;
      default: d.say(w).link(num); break;
    }
    d.gold.select = {item(t, n, a.agg)};
    return d;
  }
  if (r.cats.empty()) return std::nullopt;
  const int c = pick(r.cats, rng);
  if (chance(0.5, rng)) {
    d.say("how many").link(plural(col_word(t, c))).say("are there");
  } else {
    d.say("number of").link(plural(col_word(t, c)));
  }
  d.gold.select = {item(t, c, Aggregator::kCount)};
  return d;
}

// Group by: an aggregate per category, sum when none is named.
std::optional<Draft> group_by(const Roles& r, Rng& rng) {
  const Table& t = *r.ctx->table;
  if (r.cats.empty()) return std::nullopt;
  const int g = pick(r.cats, rng);
  Draft d;
  if (r.nums.empty() || chance(0.15, rng)) {
    const int c = other_than(r.cats, g, rng);
    if (c < 0) return std::nullopt;
    d.say("how many").link(plural(col_word(t, c))).say("for each").link(col_word(t, g));
    d.gold.select = {item(t, g), item(t, c, Aggregator::kCount)};
    d.gold.group_by = {t.column(g).name};
    return d;
  }
  const int n = pick(r.nums, rng);
  const std::string num = col_word(t, n);
  Aggregator agg = Aggregator::kSum;
  switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
    case 0: d.say("show me").link(num).say("for each").link(col_word(t, g)); break;
    case 1: d.link(num).say("by").link(col_word(t, g)); break;
    case 2: {
      const Agg& a = pick(numeric_aggs(), rng);
      agg = a.agg;
      d.say(pick(a.words, rng)).link(num).say("per").link(col_word(t, g));
      break;
    }
    case 3: {
      const int g2 = other_than(r.cats, g, rng);
      if (g2 < 0) return std::nullopt;
      d.say("show me").link(num).say("for each").link(col_word(t, g)).say("and").link(col_word(t, g2));
      d.gold.select = {item(t, g), item(t, g2), item(t, n, agg)};
      d.gold.group_by = {t.column(g).name, t.column(g2).name};
      return d;
    }
    default: {
      const Agg& a = pick(numeric_aggs(), rng);
      agg = a.agg;
      d.say(pick(a.words, rng)).link(num).say("for each").link(col_word(t, g));
      break;
    }
  }
  d.gold.select = {item(t, g), item(t, n, agg)};
  d.gold.group_by = {t.column(g).name};
  return d;
}

// Superlative: the category with the largest or smallest number.
std::optional<Draft> superlative(const Roles& r, Rng& rng) {
  const Table& t = *r.ctx->table;
  if (r.cats.empty() || r.nums.empty()) return std::nullopt;
  const int c = pick(r.cats, rng);
  const int n = pick(r.nums, rng);
  const bool desc = chance(0.6, rng);
  Draft d;
  const std::string num = col_word(t, n);
  const std::string cat = col_word(t, c);
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: d.say("which").link(cat).say(desc ? "has the highest" : "has the lowest").link(num); break;
    case 1: d.link(cat).say(desc ? "with the most" : "with the least").link(num); break;
    default: d.say(desc ? "top" : "bottom").link(cat).say("by").link(num); break;
  }
  d.gold.select = {item(t, c)};
  d.gold.superlative = Superlative{t.column(n).name, std::nullopt, desc, 1};
  return d;
}

const TableIndex::ValueEntry* some_value(const Roles& r, int& column, Rng& rng, int avoid = -1) {
  std::vector<int> cols;
  for (int c : r.cats) {
    if (c != avoid) cols.push_back(c);
  }
  if (cols.empty()) return nullptr;
  column = pick(cols, rng);
  return pick(r.values.at(column), rng);
}

// Filter: a selection restricted to one entry value.
std::optional<Draft> filter(const Roles& r, Rng& rng) {
  const Table& t = *r.ctx->table;
  int vc = -1;
  const auto* v = some_value(r, vc, rng);
  if (v == nullptr) return std::nullopt;
  Draft d;
  const Condition where = cond(t, vc, CompareOp::kEq, Value{v->raw});
  d.gold.where = {{where}};
  const int kind = std::uniform_int_distribution<int>(0, 5)(rng);
  if (kind == 5 && !r.dates.empty()) {
    const int dc = pick(r.dates, rng);
    const auto& row = pick(t.rows(), rng);
    const Date* date = std::get_if<Date>(&row[dc]);
    const int c = other_than(r.cats, -1, rng);
    if (date == nullptr || date->month == 0 || date->day == 0 || c < 0) return std::nullopt;
    static const char* kMonths[] = {"January", "February", "March",     "April",   "May",      "June",
                                    "July",    "August",   "September", "October", "November", "December"};
    d.say("list").link(plural(col_word(t, c))).say("with").link(col_word(t, dc)).say(
        std::string(kMonths[date->month - 1]) + " " + std::to_string(date->day) + " " + std::to_string(date->year));
    d.gold.select = {item(t, c)};
    d.gold.where = {{cond(t, dc, CompareOp::kEq, Value{*date})}};
    return d;
  }
  if (r.nums.empty() || kind == 0) {
    const int c = other_than(r.cats, vc, rng);
    if (c < 0) return std::nullopt;
    d.say("list").link(plural(col_word(t, c))).say("of").link(v->raw);
    d.gold.select = {item(t, c)};
    return d;
  }
  const int n = pick(r.nums, rng);
  const std::string num = col_word(t, n);
  switch (kind) {
    case 1:
      d.say("show me").link(num).say("of").link(v->raw);
      d.gold.select = {item(t, n)};
      break;
    case 2: {
      const Agg& a = pick(numeric_aggs(), rng);
      d.say(pick(a.words, rng)).link(num).say("of").link(v->raw);
      d.gold.select = {item(t, n, a.agg)};
      break;
    }
    case 3: {
      const int g = other_than(r.cats, vc, rng);
      if (g < 0) return std::nullopt;
      d.say("show me").link(num).say("of").link(v->raw).say("by each").link(col_word(t, g));
      d.gold.select = {item(t, g), item(t, n, Aggregator::kSum)};
      d.gold.group_by = {t.column(g).name};
      break;
    }
    default: {
      const int c = other_than(r.cats, vc, rng);
      if (c < 0) return std::nullopt;
      d.say("which").link(col_word(t, c)).say("of").link(v->raw).say("has the highest").link(num);
      d.gold.select = {item(t, c)};
      d.gold.superlative = Superlative{t.column(n).name, std::nullopt, true, 1};
      break;
    }
  }
  return d;
}

// Comparison: two entry values of one column side by side.
std::optional<Draft> comparison(const Roles& r, Rng& rng) {
  const Table& t = *r.ctx->table;
  if (r.nums.empty()) return std::nullopt;
  int vc = -1;
  const auto* v1 = some_value(r, vc, rng);
  if (v1 == nullptr) return std::nullopt;
  const auto* v2 = pick(r.values.at(vc), rng);
  if (v2 == v1) return std::nullopt;
  const int n = pick(r.nums, rng);
  Draft d;
  const Disjunction either = {cond(t, vc, CompareOp::kEq, Value{v1->raw}), cond(t, vc, CompareOp::kEq, Value{v2->raw})};
  d.gold.where = {either};
  if (chance(0.6, rng)) {
    d.say("compare").link(col_word(t, n)).say("of").link(v1->raw).say("and").link(v2->raw);
    d.gold.select = {item(t, n, Aggregator::kSum)};
  } else {
    d.link(col_word(t, n)).say("of").link(v1->raw).say("or").link(v2->raw);
    d.gold.select = {item(t, n)};
  }
  return d;
}

// Pinpoint: rows whose number passes a threshold.
std::optional<Draft> pinpoint(const Roles& r, Rng& rng) {
  const Table& t = *r.ctx->table;
  if (r.nums.empty()) return std::nullopt;
  const int n = pick(r.nums, rng);
  const double x = threshold(r, n, rng);
  static const std::vector<std::pair<CompareOp, std::vector<std::string>>> kOps = {
      {CompareOp::kGt, {"is more than", "is greater than", "is over"}},
      {CompareOp::kLt, {"is less than", "is under", "is below"}},
      {CompareOp::kGe, {"is at least"}},
      {CompareOp::kLe, {"is at most"}},
  };
  const auto& op = pick(kOps, rng);
  Draft d;
  d.gold.where = {{cond(t, n, op.first, Value{x})}};
  const std::string test = pick(op.second, rng) + " " + format_number(x);
  const int other = other_than(r.nums, n, rng);
  if (other >= 0 && chance(0.3, rng)) {
    const Agg& a = pick(numeric_aggs(), rng);
    d.say(pick(a.words, rng)).link(col_word(t, other)).say("where").link(col_word(t, n)).say(test);
    d.gold.select = {item(t, other, a.agg)};
    return d;
  }
  if (r.cats.empty()) return std::nullopt;
  const int c = pick(r.cats, rng);
  if (chance(0.5, rng)) {
    d.say("select").link(plural(col_word(t, c))).say("whose").link(col_word(t, n)).say(test);
  } else {
    d.say("list").link(plural(col_word(t, c))).say("where").link(col_word(t, n)).say(test);
  }
  d.gold.select = {item(t, c)};
  return d;
}

// Group with a condition on the aggregate, stated over the table.
std::optional<Draft> having(const Roles& r, Rng& rng) {
  const Table& t = *r.ctx->table;
  if (r.cats.empty() || r.nums.empty()) return std::nullopt;
  const int g = pick(r.cats, rng);
  const int n = pick(r.nums, rng);
  const double x = threshold(r, n, rng);
  const bool more = chance(0.5, rng);
  Draft d;
  d.say("total").link(col_word(t, n), false).say("by").link(col_word(t, g)).say("in").link(
      r.ctx->index->table_entry().lower, false);
  d.say("with").link(col_word(t, n), false).say(std::string(more ? "more than " : "less than ") + format_number(x));
  d.gold.select = {item(t, g), item(t, n, Aggregator::kSum)};
  d.gold.group_by = {t.column(g).name};
  d.gold.having = {HavingCondition{Aggregator::kSum, t.column(n).name, more ? CompareOp::kGt : CompareOp::kLt, Value{x}}};
  return d;
}

bool reachable(const std::string& q, const SqlQuery& gold, const TableContext& ctx, const Vocabulary& vocab) {
  return label_candidates(q, gold, ctx, vocab).positives > 0;
}

}  // namespace

Corpus generate_synthetic(const std::map<std::string, std::shared_ptr<const TableContext>>& tables, size_t n,
                          const Vocabulary& vocab, const SyntheticOptions& options) {
  Corpus out;
  out.tables = tables;
  if (n == 0) return out;
  std::vector<std::pair<std::string, Roles>> usable;
  for (const auto& [id, ctx] : tables) {
    Roles r = analyze(*ctx, vocab);
    if (r.nums.empty() || r.cats.empty()) {
      out.warnings.push_back("table " + id + " lacks a numeric or a categorical column; skipped");
      continue;
    }
    usable.emplace_back(id, std::move(r));
  }
  if (usable.empty()) throw ValidationError("no table is usable for generation");

  const std::vector<std::pair<double, Template>> templates = {
      {0.15, statistic}, {0.2, group_by}, {0.15, superlative}, {0.2, filter},
      {0.1, comparison}, {0.15, pinpoint}, {0.05, having},
  };
  std::vector<double> weights;
  for (const auto& t : templates) weights.push_back(t.first);
  std::discrete_distribution<size_t> which(weights.begin(), weights.end());
  Rng rng(options.seed);
  std::set<std::string> seen;
  size_t attempts = 0;
  while (out.examples.size() < n) {
    if (++attempts > 200 * n) throw std::logic_error("template generation stalled");
    const auto& [id, roles] = usable[out.examples.size() % usable.size()];
    std::optional<Draft> d = templates[which(rng)].second(roles, rng);
    if (!d) continue;
    std::string question = d->text();
    if (!seen.insert(id + "\n" + question).second) continue;
    const TableContext& ctx = *tables.at(id);
    validate(d->gold, *ctx.table);
    if (chance(options.typo_rate, rng)) {
      std::vector<size_t> slots;
      for (size_t i = 0; i < d->pieces.size(); ++i) {
        if (d->pieces[i].typo_ok) slots.push_back(i);
      }
      if (!slots.empty()) {
        Draft noisy = *d;
        auto& piece = noisy.pieces[pick(slots, rng)];
        if (auto changed = typo(piece.text, rng)) {
          piece.text = *changed;
          // Keep the typo only when abstraction still recovers the link.
          if (!options.verify || reachable(noisy.text(), d->gold, ctx, vocab)) question = noisy.text();
        }
      }
    }
    if (options.verify && !reachable(question, d->gold, ctx, vocab)) {
      throw std::logic_error("generated question is unreachable: \"" + question + "\" for " +
                             render_sql(d->gold, id));
    }
    out.examples.push_back({question, id, d->gold});
  }
  return out;
}

}  // namespace tq
