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

#include "tablequery/chart.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <tuple>

namespace tq {

std::string_view surface_mode_name(SurfaceMode mode) {
  switch (mode) {
    case SurfaceMode::kInside: return "inside";
    case SurfaceMode::kLeft: return "left";
    case SurfaceMode::kRight: return "right";
    case SurfaceMode::kBidirectional: return "bidirectional";
  }
  return "?";
}

std::optional<SurfaceMode> parse_surface_mode(std::string_view text) {
  for (SurfaceMode m : {SurfaceMode::kInside, SurfaceMode::kLeft, SurfaceMode::kRight, SurfaceMode::kBidirectional}) {
    if (text == surface_mode_name(m)) return m;
  }
  return std::nullopt;
}

std::string surface_token(const Token& t) {
  switch (t.kind) {
    case Token::Kind::kCommon: return t.word;
    case Token::Kind::kUnknown: return kUnkToken;
    case Token::Kind::kSymbol: return std::string(1, kind_letter(t.symbol->kind));
  }
  return kUnkToken;
}

SurfaceStructure surface(const AbstractedUtterance& u, Span s, SurfaceMode mode) {
  SurfaceStructure out;
  out.mode = mode;
  const int n = static_cast<int>(u.tokens.size());
  int begin = s.start;
  int end = s.end;
  if (mode == SurfaceMode::kLeft || mode == SurfaceMode::kBidirectional) {
    while (begin > 0 && !u.tokens[begin - 1].is_symbol()) --begin;
  }
  if (mode == SurfaceMode::kRight || mode == SurfaceMode::kBidirectional) {
    while (end < n && !u.tokens[end].is_symbol()) ++end;
  }
  for (int i = begin; i < end; ++i) {
    out.positions.push_back(i);
    out.tokens.push_back(surface_token(u.tokens[i]));
  }
  if (out.tokens.empty()) out.tokens.push_back(kEmptyToken);
  return out;
}

namespace {

class ZeroNodeScorer : public NodeScorer {
 public:
  double score(RuleId, Predicate, Span) override { return 0.0; }
};

constexpr uint64_t kSaturated = uint64_t{1} << 62;

uint64_t sat_add(uint64_t a, uint64_t b) { return std::min(kSaturated, a + b); }

uint64_t sat_mul(uint64_t a, uint64_t b) {
  uint64_t r;
  if (__builtin_mul_overflow(a, b, &r) || r > kSaturated) return kSaturated;
  return r;
}

}  // namespace

std::unique_ptr<NodeScorer> UniformScorer::bind(const AbstractedUtterance&) const {
  return std::make_unique<ZeroNodeScorer>();
}

bool is_root_kind(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::kT:
    case SymbolKind::kC:
    case SymbolKind::kA:
    case SymbolKind::kG:
    case SymbolKind::kS:
    case SymbolKind::kF:
      return true;
    default:
      return false;
  }
}

void Chart::add(int i, int j, const SymbolInstance& symbol, const BackPointer& bp) {
  Cell& c = cell_mut(i, j);
  auto it = c.by_signature.find(symbol);
  if (it == c.by_signature.end()) {
    if (item_count_ >= limits_.max_items) {
      item_cap_hit_ = true;
      return;
    }
    it = c.by_signature.emplace(symbol, static_cast<int>(c.items.size())).first;
    c.items.push_back({symbol, {}, 0});
    ++item_count_;
  }
  c.items[it->second].backs.push_back(bp);
}

Chart::Chart(const AbstractedUtterance& u, ParseLimits limits) : u_(&u), limits_(limits) {
  positions_ = u.symbol_positions();
  const int m = num_symbols();
  if (m == 0) throw ParseError(ParseError::Kind::kNothingToParse, "utterance has no symbol to parse");
  cells_.resize(static_cast<size_t>(m) * m);

  for (int len = 1; len <= m; ++len) {
    for (int i = 0; i + len <= m; ++i) {
      const int j = i + len - 1;
      if (len == 1) {
        add(i, i, *u.tokens[positions_[i]].symbol, BackPointer{});
      } else {
        for (int k = i; k < j; ++k) {
          const Cell& left = cell(i, k);
          const Cell& right = cell(k + 1, j);
          for (size_t li = 0; li < left.items.size(); ++li) {
            for (size_t ri = 0; ri < right.items.size(); ++ri) {
              for (const RuleApplication& app : applicable(left.items[li].symbol, right.items[ri].symbol)) {
                add(i, j, app.output,
                    {app.rule, app.predicate, k, static_cast<int>(li), static_cast<int>(ri), app.swapped});
              }
            }
          }
        }
      }
      // Raising after composition; raised kinds (A, F) are never raised.
      Cell& c = cell_mut(i, j);
      const size_t before = c.items.size();
      for (size_t idx = 0; idx < before; ++idx) {
        const SymbolInstance sym = c.items[idx].symbol;
        for (const RuleApplication& app : applicable(sym)) {
          add(i, j, app.output, {app.rule, app.predicate, -1, static_cast<int>(idx), -1, false});
        }
      }
      // Tree counts: composition and leaf back-pointers first, then raising,
      // whose children never carry raising back-pointers themselves.
      Cell& done = cell_mut(i, j);
      for (int pass = 0; pass < 2; ++pass) {
        for (Item& item : done.items) {
          for (const BackPointer& bp : item.backs) {
            const bool raising = is_raising(bp.rule);
            if (raising != (pass == 1)) continue;
            if (bp.rule == RuleId::kLeaf) {
              item.count = sat_add(item.count, 1);
            } else if (raising) {
              item.count = sat_add(item.count, done.items[bp.left].count);
            } else {
              item.count = sat_add(item.count, sat_mul(cell(i, bp.split).items[bp.left].count,
                                                       cell(bp.split + 1, j).items[bp.right].count));
            }
          }
        }
      }
    }
  }

  const Cell& top = cell(0, m - 1);
  for (size_t idx = 0; idx < top.items.size(); ++idx) {
    if (!is_root_kind(top.items[idx].symbol.kind)) continue;
    roots_.push_back(static_cast<int>(idx));
    tree_count_ = sat_add(tree_count_, top.items[idx].count);
  }
}

NodePtr Chart::build(int i, int j, int item_index, uint64_t k) const {
  const Cell& c = cell(i, j);
  const Item& item = c.items[item_index];
  for (const BackPointer& bp : item.backs) {
    uint64_t n;
    if (bp.rule == RuleId::kLeaf) {
      n = 1;
    } else if (is_raising(bp.rule)) {
      n = c.items[bp.left].count;
    } else {
      n = sat_mul(cell(i, bp.split).items[bp.left].count, cell(bp.split + 1, j).items[bp.right].count);
    }
    if (k >= n) {
      k -= n;
      continue;
    }
    if (bp.rule == RuleId::kLeaf) return make_leaf(item.symbol, positions_[i]);
    if (is_raising(bp.rule)) {
      return make_node(bp.rule, bp.predicate, span_of(i, j), item.symbol, {build(i, j, bp.left, k)});
    }
    const uint64_t right_count = cell(bp.split + 1, j).items[bp.right].count;
    NodePtr l = build(i, bp.split, bp.left, k / right_count);
    NodePtr r = build(bp.split + 1, j, bp.right, k % right_count);
    return make_node(bp.rule, bp.predicate, span_of(i, j), item.symbol, {l, r}, bp.swapped);
  }
  throw std::out_of_range("derivation index out of range");
}

Derivation Chart::tree(uint64_t k) const {
  const int m = num_symbols();
  const Cell& top = cell(0, m - 1);
  for (int idx : roots_) {
    const uint64_t n = top.items[idx].count;
    if (k < n) return Derivation{build(0, m - 1, idx, k)};
    k -= n;
  }
  throw std::out_of_range("derivation index out of range");
}

Chart::Best Chart::best(NodeScorer& scorer) const {
  const int m = num_symbols();
  if (roots_.empty()) throw ParseError(ParseError::Kind::kNoValidTree, "no valid derivation");
  constexpr double kUnset = -std::numeric_limits<double>::infinity();
  // best value and chosen back-pointer per (cell, item)
  std::vector<std::vector<double>> value(cells_.size());
  std::vector<std::vector<int>> choice(cells_.size());
  std::vector<double> node_cache(cells_.size() * kNumRulePredicates, std::numeric_limits<double>::quiet_NaN());

  auto node_score = [&](int i, int j, RuleId rule, Predicate pred) {
    const int rp = rule_predicate_index(rule, pred);
    double& slot = node_cache[static_cast<size_t>(i * m + j) * kNumRulePredicates + rp];
    if (std::isnan(slot)) slot = scorer.score(rule, pred, span_of(i, j));
    return slot;
  };

  for (int len = 1; len <= m; ++len) {
    for (int i = 0; i + len <= m; ++i) {
      const int j = i + len - 1;
      const size_t ci = static_cast<size_t>(i) * m + j;
      const Cell& c = cells_[ci];
      value[ci].assign(c.items.size(), kUnset);
      choice[ci].assign(c.items.size(), -1);
      for (int pass = 0; pass < 2; ++pass) {
        for (size_t it = 0; it < c.items.size(); ++it) {
          const Item& item = c.items[it];
          for (size_t b = 0; b < item.backs.size(); ++b) {
            const BackPointer& bp = item.backs[b];
            const bool raising = is_raising(bp.rule);
            if (raising != (pass == 1)) continue;
            double v;
            if (bp.rule == RuleId::kLeaf) {
              v = 0.0;
            } else if (raising) {
              v = node_score(i, j, bp.rule, bp.predicate) + value[ci][bp.left];
            } else {
              v = node_score(i, j, bp.rule, bp.predicate) + value[static_cast<size_t>(i) * m + bp.split][bp.left] +
                  value[static_cast<size_t>(bp.split + 1) * m + j][bp.right];
            }
            const int prev = choice[ci][it];
            bool take = prev < 0 || v > value[ci][it];
            if (!take && v == value[ci][it]) {
              const BackPointer& p = item.backs[prev];
              take = std::tuple(static_cast<int>(bp.rule), static_cast<int>(bp.predicate), bp.split) <
                     std::tuple(static_cast<int>(p.rule), static_cast<int>(p.predicate), p.split);
            }
            if (take) {
              value[ci][it] = v;
              choice[ci][it] = static_cast<int>(b);
            }
          }
        }
      }
    }
  }

  const size_t top = static_cast<size_t>(m - 1);
  int best_root = -1;
  for (int idx : roots_) {
    if (best_root < 0 || value[top][idx] > value[top][best_root]) best_root = idx;
  }

  std::function<NodePtr(int, int, int)> rebuild = [&](int i, int j, int it) -> NodePtr {
    const size_t ci = static_cast<size_t>(i) * m + j;
    const Item& item = cells_[ci].items[it];
    const BackPointer& bp = item.backs[choice[ci][it]];
    if (bp.rule == RuleId::kLeaf) return make_leaf(item.symbol, positions_[i]);
    if (is_raising(bp.rule)) return make_node(bp.rule, bp.predicate, span_of(i, j), item.symbol, {rebuild(i, j, bp.left)});
    return make_node(bp.rule, bp.predicate, span_of(i, j), item.symbol,
                     {rebuild(i, bp.split, bp.left), rebuild(bp.split + 1, j, bp.right)}, bp.swapped);
  };
  return {Derivation{rebuild(0, m - 1, best_root)}, value[top][best_root]};
}

ParseAllResult parse_all(const AbstractedUtterance& u, ParseLimits limits) {
  Chart chart(u, limits);
  if (chart.tree_count() == 0) throw ParseError(ParseError::Kind::kNoValidTree, "no valid derivation");
  ParseAllResult out;
  out.total = chart.tree_count();
  const uint64_t n = std::min<uint64_t>(out.total, limits.max_trees);
  out.truncated = n < out.total || chart.item_cap_hit();
  out.trees.reserve(n);
  for (uint64_t k = 0; k < n; ++k) out.trees.push_back(chart.tree(k));
  return out;
}

ParseBestResult parse_best(const AbstractedUtterance& u, const Scorer& scorer, ParseLimits limits) {
  Chart chart(u, limits);
  auto bound = scorer.bind(u);
  Chart::Best b = chart.best(*bound);
  return {std::move(b.derivation), b.score};
}

double derivation_score(const Derivation& d, NodeScorer& scorer) {
  double total = 0;
  d.visit([&](const DerivationNode& n) {
    if (!n.is_leaf()) total += scorer.score(n.rule, n.predicate, n.span);
  });
  return total;
}

}  // namespace tq
