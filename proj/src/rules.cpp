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

#include "tablequery/rules.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <sstream>

namespace tq {

namespace {

struct PairId {
  RuleId rule;
  Predicate predicate;
};

constexpr std::array<PairId, kNumRulePredicates> kPairs = {{
    {RuleId::kProject, Predicate::kProject},
    {RuleId::kFilter, Predicate::kFilter},
    {RuleId::kGroup, Predicate::kGroup},
    {RuleId::kEqual, Predicate::kEqual},
    {RuleId::kCompare, Predicate::kMore},
    {RuleId::kCompare, Predicate::kLess},
    {RuleId::kCompare, Predicate::kAtLeast},
    {RuleId::kCompare, Predicate::kAtMost},
    {RuleId::kConjunction, Predicate::kAnd},
    {RuleId::kConjunction, Predicate::kOr},
    {RuleId::kSuperlative, Predicate::kArgmax},
    {RuleId::kSuperlative, Predicate::kArgmin},
    {RuleId::kCombineColumns, Predicate::kCombine},
    {RuleId::kCombineAggregates, Predicate::kCombine},
    {RuleId::kModify, Predicate::kModify},
    {RuleId::kAggregateNum, Predicate::kMin},
    {RuleId::kAggregateNum, Predicate::kMax},
    {RuleId::kAggregateNum, Predicate::kSum},
    {RuleId::kAggregateNum, Predicate::kAvg},
    {RuleId::kAggregateCount, Predicate::kCount},
    {RuleId::kRaiseFilter, Predicate::kEqual},
}};

bool is(const SymbolInstance& s, std::initializer_list<SymbolKind> kinds) {
  return std::find(kinds.begin(), kinds.end(), s.kind) != kinds.end();
}

bool typed(const SymbolInstance& s, std::initializer_list<ColumnType> types) {
  return s.type && std::find(types.begin(), types.end(), *s.type) != types.end();
}

SymbolInstance with(SymbolKind kind, ColumnSet cols) {
  SymbolInstance s;
  s.kind = kind;
  s.cols = cols;
  return s;
}

bool is_year_number(const Value& v) {
  const double* x = std::get_if<double>(&v);
  return x != nullptr && *x == static_cast<double>(static_cast<int>(*x)) && *x >= 1000 && *x <= 9999;
}

// Rule-order operand symmetry: F+F, C+C and A+A.
bool symmetric(RuleId rule) {
  return rule == RuleId::kConjunction || rule == RuleId::kCombineColumns || rule == RuleId::kCombineAggregates;
}

}  // namespace

int rule_predicate_index(RuleId rule, Predicate predicate) {
  for (int i = 0; i < kNumRulePredicates; ++i) {
    if (kPairs[i].rule == rule && kPairs[i].predicate == predicate) return i;
  }
  return -1;
}

int rule_index(RuleId rule) { return static_cast<int>(rule) - 1; }

std::string rule_predicate_name(int index) {
  const PairId& p = kPairs.at(index);
  return std::string(rule_name(p.rule)) + ":" + std::string(predicate_name(p.predicate));
}

std::vector<Predicate> rule_predicates(RuleId rule) {
  std::vector<Predicate> out;
  for (const PairId& p : kPairs) {
    if (p.rule == rule) out.push_back(p.predicate);
  }
  return out;
}

const std::vector<RuleId>& composition_rules() {
  static const std::vector<RuleId> kRules = {
      RuleId::kProject,     RuleId::kFilter,         RuleId::kGroup,
      RuleId::kEqual,       RuleId::kCompare,        RuleId::kConjunction,
      RuleId::kSuperlative, RuleId::kCombineColumns, RuleId::kCombineAggregates,
      RuleId::kModify};
  return kRules;
}

const std::vector<RuleId>& raising_rules() {
  static const std::vector<RuleId> kRules = {RuleId::kAggregateNum, RuleId::kAggregateCount, RuleId::kRaiseFilter};
  return kRules;
}

bool check_modification(const SymbolInstance& head, const SymbolInstance& f) {
  return !head.cols.intersects(f.cols);
}

std::optional<SymbolInstance> apply_rule(RuleId rule, const SymbolInstance& a, const SymbolInstance* b) {
  using K = SymbolKind;
  using T = ColumnType;
  if (is_composition(rule) != (b != nullptr)) return std::nullopt;
  switch (rule) {
    case RuleId::kLeaf:
      return std::nullopt;
    case RuleId::kProject:
      if (!is(a, {K::kC, K::kA, K::kG, K::kS}) || b->kind != K::kT) return std::nullopt;
      if (!a.cols.subset_of(b->cols)) return std::nullopt;
      return with(K::kT, a.cols);
    case RuleId::kFilter:
      if (a.kind != K::kF || b->kind != K::kT || !a.cols.subset_of(b->cols)) return std::nullopt;
      return with(K::kT, b->cols);
    case RuleId::kGroup:
      if (!is(a, {K::kA, K::kG}) || b->kind != K::kC || !typed(*b, {T::kStr, T::kDate})) return std::nullopt;
      return with(K::kG, a.cols | b->cols);
    case RuleId::kEqual: {
      // A single column that holds the value; an unbound date matches any
      // date column.
      if (a.kind != K::kC || a.cols.size() != 1 || !is(*b, {K::kV, K::kD})) return std::nullopt;
      const bool ok = b->cols.empty() ? (b->kind == K::kD && typed(a, {T::kDate})) : a.cols.subset_of(b->cols);
      if (!ok) return std::nullopt;
      return with(K::kF, a.cols);
    }
    case RuleId::kCompare: {
      if (a.kind != K::kC || a.cols.size() != 1 || b->kind != K::kN) return std::nullopt;
      // An unbound number matches num columns, and date columns when it
      // reads as a year.
      const bool ok = b->cols.empty() ? typed(a, {T::kNum}) || (typed(a, {T::kDate}) && is_year_number(*b->value))
                                      : a.cols.subset_of(b->cols);
      if (!ok) return std::nullopt;
      return with(K::kF, a.cols);
    }
    case RuleId::kConjunction:
      if (a.kind != K::kF || b->kind != K::kF) return std::nullopt;
      return with(K::kF, a.cols | b->cols);
    case RuleId::kSuperlative: {
      const bool first_ok = a.kind == K::kA || (a.kind == K::kC && typed(a, {T::kStr, T::kDate}));
      if (!first_ok || b->kind != K::kC || b->cols.size() != 1 || !typed(*b, {T::kNum})) return std::nullopt;
      return with(K::kS, a.cols | b->cols);
    }
    case RuleId::kCombineColumns: {
      if (a.kind != K::kC || b->kind != K::kC) return std::nullopt;
      SymbolInstance out = with(K::kC, a.cols | b->cols);
      if (a.type && a.type == b->type) out.type = a.type;
      return out;
    }
    case RuleId::kCombineAggregates:
      if (a.kind != K::kA || b->kind != K::kA) return std::nullopt;
      return with(K::kA, a.cols | b->cols);
    case RuleId::kModify:
      if (!is(a, {K::kC, K::kA, K::kG, K::kS}) || b->kind != K::kF || !check_modification(a, *b)) {
        return std::nullopt;
      }
      return a;
    case RuleId::kAggregateNum:
      if (a.kind != K::kC || !typed(a, {T::kNum})) return std::nullopt;
      return with(K::kA, a.cols);
    case RuleId::kAggregateCount:
      if (a.kind != K::kC || !typed(a, {T::kStr, T::kDate})) return std::nullopt;
      return with(K::kA, a.cols);
    case RuleId::kRaiseFilter:
      if (!is(a, {K::kV, K::kD}) || a.cols.empty()) return std::nullopt;
      return with(K::kF, a.cols);
  }
  return std::nullopt;
}

std::vector<RuleApplication> applicable(const SymbolInstance& only) {
  std::vector<RuleApplication> out;
  for (RuleId rule : raising_rules()) {
    auto result = apply_rule(rule, only, nullptr);
    if (!result) continue;
    for (Predicate p : rule_predicates(rule)) out.push_back({rule, p, *result, false});
  }
  return out;
}

std::vector<RuleApplication> applicable(const SymbolInstance& left, const SymbolInstance& right) {
  std::vector<RuleApplication> out;
  for (RuleId rule : composition_rules()) {
    auto straight = apply_rule(rule, left, &right);
    auto crossed = apply_rule(rule, right, &left);
    if (crossed && straight && symmetric(rule) && *crossed == *straight) crossed.reset();
    for (Predicate p : rule_predicates(rule)) {
      if (straight) out.push_back({rule, p, *straight, false});
      if (crossed) out.push_back({rule, p, *crossed, true});
    }
  }
  return out;
}

std::vector<RuleApplication> applicable(std::span<const SymbolInstance> inputs) {
  if (inputs.size() == 1) return applicable(inputs[0]);
  if (inputs.size() == 2) return applicable(inputs[0], inputs[1]);
  return {};
}

std::vector<RaisingEdge> raising_edges() {
  return {{SymbolKind::kC, SymbolKind::kA, RuleId::kAggregateNum},
          {SymbolKind::kC, SymbolKind::kA, RuleId::kAggregateCount},
          {SymbolKind::kV, SymbolKind::kF, RuleId::kRaiseFilter},
          {SymbolKind::kD, SymbolKind::kF, RuleId::kRaiseFilter}};
}

std::vector<std::vector<SymbolKind>> detect_loops(const std::vector<RaisingEdge>& edges) {
  // Tarjan's SCC over the 9 kinds.
  constexpr int n = kNumSymbolKinds;
  std::array<std::vector<int>, n> adj;
  std::array<bool, n> self_loop{};
  for (const RaisingEdge& e : edges) {
    adj[static_cast<int>(e.from)].push_back(static_cast<int>(e.to));
    if (e.from == e.to) self_loop[static_cast<int>(e.from)] = true;
  }
  std::array<int, n> index, low;
  std::array<bool, n> on_stack{};
  index.fill(-1);
  low.fill(0);
  std::vector<int> stack;
  int counter = 0;
  std::vector<std::vector<SymbolKind>> out;
  std::function<void(int)> visit = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : adj[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] != index[v]) return;
    std::vector<SymbolKind> scc;
    int w;
    do {
      w = stack.back();
      stack.pop_back();
      on_stack[w] = false;
      scc.push_back(static_cast<SymbolKind>(w));
    } while (w != v);
    if (scc.size() > 1 || self_loop[v]) {
      std::sort(scc.begin(), scc.end());
      out.push_back(std::move(scc));
    }
  };
  for (int v = 0; v < n; ++v) {
    if (index[v] < 0) visit(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string dump_rules() {
  struct Row {
    const char* rule;
    const char* precondition;
    const char* schema;
  };
  static const Row kComposition[] = {
      {"C|A|G|S + T -> T^ : [project]", "(C|A|G|S).col ⊆ T.col", "T^.col = (C|A|G|S).col"},
      {"F + T -> T^ : [filter]", "F.col ⊆ T.col", "T^.col = T.col"},
      {"A|G + C -> G^ : [group]", "C.type ∈ {str, date}", "G^.col = (A|G).col ∪ C.col"},
      {"C + V|D -> F^ : [equal]", "C.col = (V|D).col", "F^.col = C.col"},
      {"C + N -> F^ : [more|less|>=|<=]", "C.col = N.col", "F^.col = C.col"},
      {"F + F -> F^ : [and|or]", "N/A", "F^.col = F.col ∪ F.col"},
      {"A|C1 + C2 -> S^ : [argmax|argmin]", "C1.type ∈ {str, date}, C2.type = num", "S^.col = (A|C1).col ∪ C2.col"},
      {"C + C -> C^ : [combine]", "N/A", "C^.col = C.col ∪ C.col"},
      {"A + A -> A^ : [combine]", "N/A", "A^.col = A.col ∪ A.col"},
      {"C|A|G|S + F -> C^|A^|G^|S^ : [modify]", "(C|A|G|S).col ∩ F.col = ∅", "(C^|A^|G^|S^).col = (C|A|G|S).col"},
  };
  static const Row kRaising[] = {
      {"C -> A^ : [min|max|sum|avg]", "C.type = num", "A^.col = C.col"},
      {"C -> A^ : [count]", "C.type ∈ {str, date}", "A^.col = C.col"},
      {"V|D -> F^ : [equal]", "N/A", "F^.col = (V|D).col"},
  };
  std::ostringstream os;
  auto row = [&](const Row& r) {
    os << "  " << r.rule;
    for (size_t i = std::string_view(r.rule).size(); i < 40; ++i) os << ' ';
    os << " | " << r.precondition << " | " << r.schema << "\n";
  };
  os << "Symbols -> Symbol : [predicate] | Precondition | Schema\n";
  os << "Composition rules\n";
  for (const Row& r : kComposition) row(r);
  os << "Raising rules\n";
  for (const Row& r : kRaising) row(r);
  return os.str();
}

}  // namespace tq
