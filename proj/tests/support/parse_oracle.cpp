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

#include <map>
#include <stdexcept>

#include "support.hpp"

namespace tqt {

using tq::SymbolInstance;
using K = tq::SymbolKind;

namespace {

uint64_t mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<size_t>(0, v.size() - 1)(rng)];
}

std::vector<int> columns_typed(const tq::Table& t, tq::ColumnType type) {
  std::vector<int> out;
  for (int c = 0; c < t.num_columns(); ++c) {
    if (t.column(c).type == type) out.push_back(c);
  }
  return out;
}

// A non-null cell of column c.
std::optional<tq::Value> some_cell(Rng& rng, const tq::Table& t, int c) {
  std::vector<tq::Value> cells;
  for (const auto& row : t.rows()) {
    if (!tq::is_null(row[c])) cells.push_back(row[c]);
  }
  if (cells.empty()) return std::nullopt;
  return pick(rng, cells);
}

SymbolInstance random_leaf(Rng& rng, const tq::TableContext& ctx) {
  const tq::Table& t = *ctx.table;
  const tq::TableIndex& index = *ctx.index;
  const std::vector<int> nums = columns_typed(t, tq::ColumnType::kNum);
  const std::vector<int> dates = columns_typed(t, tq::ColumnType::kDate);
  const int roll = std::uniform_int_distribution<int>(0, 99)(rng);
  SymbolInstance s;
  if (roll < 10) return SymbolInstance::table(t);
  if (roll < 50) return SymbolInstance::column(t, std::uniform_int_distribution<int>(0, t.num_columns() - 1)(rng));
  if (roll < 70 && !index.values().empty()) {
    const auto& v = pick(rng, index.values());
    s.kind = K::kV;
    s.cols = v.cols;
    s.value = v.raw;
    return s;
  }
  if (roll < 90 || dates.empty()) {
    s.kind = K::kN;
    std::optional<tq::Value> cell;
    if (!nums.empty()) cell = some_cell(rng, t, pick(rng, nums));
    s.value = cell ? *cell : tq::Value(2019.0);
    s.cols = index.columns_containing(*s.value);
    return s;
  }
  s.kind = K::kD;
  std::optional<tq::Value> cell = some_cell(rng, t, pick(rng, dates));
  s.value = cell ? *cell : tq::Value(tq::Date{2019, 6, 20});
  if (std::uniform_int_distribution<int>(0, 3)(rng) > 0) s.cols = index.columns_containing(*s.value);
  return s;
}

struct Tree {
  SymbolInstance result;
  std::string text;
};

bool symmetric(tq::RuleId rule) {
  return rule == tq::RuleId::kConjunction || rule == tq::RuleId::kCombineColumns ||
         rule == tq::RuleId::kCombineAggregates;
}

bool raising(tq::RuleId rule) {
  return rule == tq::RuleId::kAggregateNum || rule == tq::RuleId::kAggregateCount ||
         rule == tq::RuleId::kRaiseFilter;
}

std::string node_head(tq::RuleId rule, tq::Predicate p, int start, int end, const SymbolInstance& s, bool swapped) {
  std::string out = "[" + std::string(tq::rule_name(rule)) + "/" + std::string(tq::predicate_name(p)) + " " +
                    std::to_string(start) + "-" + std::to_string(end) + " " + s.signature();
  if (swapped) out += " swapped";
  return out;
}

class BruteForce {
 public:
  BruteForce(const tq::AbstractedUtterance& u, size_t cap) : u_(u), cap_(cap) {
    for (size_t i = 0; i < u.tokens.size(); ++i) {
      if (u.tokens[i].is_symbol()) pos_.push_back(static_cast<int>(i));
    }
  }

  int size() const { return static_cast<int>(pos_.size()); }

  const std::vector<Tree>& trees(int i, int j) {
    auto key = std::make_pair(i, j);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<Tree> out;
    const int start = pos_[i], end = pos_[j] + 1;
    if (i == j) {
      const SymbolInstance& s = *u_.tokens[pos_[i]].symbol;
      out.push_back({s, s.signature() + "@" + std::to_string(pos_[i])});
    } else {
      for (int k = i; k < j; ++k) {
        const std::vector<Tree>& left = trees(i, k);
        const std::vector<Tree>& right = trees(k + 1, j);
        for (const Tree& l : left) {
          for (const Tree& r : right) {
            for (tq::RuleId rule : all_rules()) {
              if (raising(rule)) continue;
              for (int order = 0; order < 2; ++order) {
                if (order == 1 && symmetric(rule)) break;
                const Tree& first = order == 0 ? l : r;
                const Tree& second = order == 0 ? r : l;
                auto res = oracle_apply(rule, first.result, &second.result);
                if (!res) continue;
                for (tq::Predicate p : oracle_predicates(rule)) {
                  out.push_back({*res, node_head(rule, p, start, end, *res, order == 1) + " " + l.text + " " +
                                           r.text + "]"});
                  check(out.size());
                }
              }
            }
          }
        }
      }
    }
    // One raising step over every tree built so far.
    const size_t composed = out.size();
    for (size_t t = 0; t < composed; ++t) {
      for (tq::RuleId rule : all_rules()) {
        if (!raising(rule)) continue;
        auto res = oracle_apply(rule, out[t].result, nullptr);
        if (!res) continue;
        for (tq::Predicate p : oracle_predicates(rule)) {
          out.push_back({*res, node_head(rule, p, start, end, *res, false) + " " + out[t].text + "]"});
          check(out.size());
        }
      }
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  void check(size_t n) const {
    if (n > cap_) throw std::length_error("brute-force enumeration exceeds its cap");
  }

  const tq::AbstractedUtterance& u_;
  size_t cap_;
  std::vector<int> pos_;
  std::map<std::pair<int, int>, std::vector<Tree>> memo_;
};

class HashNodeScorer : public tq::NodeScorer {
 public:
  explicit HashNodeScorer(uint64_t seed) : seed_(seed) {}
  double score(tq::RuleId rule, tq::Predicate p, tq::Span span) override {
    uint64_t h = mix(seed_);
    h = mix(h ^ static_cast<uint64_t>(rule));
    h = mix(h ^ static_cast<uint64_t>(p));
    h = mix(h ^ static_cast<uint64_t>(span.start));
    h = mix(h ^ static_cast<uint64_t>(span.end));
    return static_cast<double>(h >> 11) / static_cast<double>(uint64_t{1} << 53) * 2.0 - 1.0;
  }

 private:
  uint64_t seed_;
};

}  // namespace

tq::AbstractedUtterance random_utterance(Rng& rng, const tq::TableContext& ctx, int max_symbols) {
  const int m = std::uniform_int_distribution<int>(1, max_symbols)(rng);
  const std::vector<std::string>& words = vocab().entries();
  tq::AbstractedUtterance u;
  size_t offset = 0;
  auto push = [&](tq::Token t, size_t len) {
    t.source = {offset, offset + len};
    offset += len + 1;
    u.tokens.push_back(std::move(t));
  };
  for (int s = 0; s < m; ++s) {
    const int filler = std::uniform_int_distribution<int>(0, 2)(rng);
    for (int f = 0; f < filler; ++f) {
      if (std::uniform_int_distribution<int>(0, 4)(rng) == 0) {
        push(tq::Token::unknown("zzz", {}), 3);
        ++u.unknown_count;
      } else {
        const std::string& w = pick(rng, words);
        push(tq::Token::common(w, {}), w.size());
      }
    }
    SymbolInstance sym = random_leaf(rng, ctx);
    push(tq::Token::of_symbol(sym, "x", {}), 1);
  }
  return u;
}

std::optional<std::set<std::string>> brute_force_trees(const tq::AbstractedUtterance& u, size_t cap) {
  BruteForce bf(u, cap);
  if (bf.size() == 0) return std::set<std::string>{};
  std::set<std::string> out;
  try {
    for (const Tree& t : bf.trees(0, bf.size() - 1)) {
      const K k = t.result.kind;
      if (k == K::kT || k == K::kC || k == K::kA || k == K::kG || k == K::kS || k == K::kF) {
        if (!out.insert(t.text).second) throw std::logic_error("duplicate tree " + t.text);
      }
    }
  } catch (const std::length_error&) {
    return std::nullopt;
  }
  return out;
}

std::string tree_text(const tq::DerivationNode& n) {
  if (n.is_leaf()) return n.result.signature() + "@" + std::to_string(n.token);
  std::string out = node_head(n.rule, n.predicate, n.span.start, n.span.end, n.result, n.swapped);
  for (const tq::NodePtr& c : n.children) out += " " + tree_text(*c);
  return out + "]";
}

std::unique_ptr<tq::NodeScorer> HashScorer::bind(const tq::AbstractedUtterance&) const {
  return std::make_unique<HashNodeScorer>(seed_);
}

}  // namespace tqt
