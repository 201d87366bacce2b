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

#ifndef TABLEQUERY_DERIVATION_HPP_
#define TABLEQUERY_DERIVATION_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tablequery/symbol.hpp"

namespace tq {

// The deduction rules. kLeaf marks a symbol token of the utterance.
enum class RuleId : uint8_t {
  kLeaf,
  // Composition.
  kProject,            // C|A|G|S + T -> T : project
  kFilter,             // F + T -> T : filter
  kGroup,              // A|G + C -> G : group
  kEqual,              // C + V|D -> F : equal
  kCompare,            // C + N -> F : more|less|>=|<=
  kConjunction,        // F + F -> F : and|or
  kSuperlative,        // A|C + C -> S : argmax|argmin
  kCombineColumns,     // C + C -> C : combine
  kCombineAggregates,  // A + A -> A : combine
  kModify,             // C|A|G|S + F -> C|A|G|S : modify
  // Raising.
  kAggregateNum,       // C -> A : min|max|sum|avg
  kAggregateCount,     // C -> A : count
  kRaiseFilter,        // V|D -> F : equal
};

inline constexpr int kNumRules = 13;

enum class Predicate : uint8_t {
  kNone,
  kProject,
  kFilter,
  kGroup,
  kEqual,
  kMore,
  kLess,
  kAtLeast,
  kAtMost,
  kAnd,
  kOr,
  kArgmax,
  kArgmin,
  kCombine,
  kModify,
  kMin,
  kMax,
  kSum,
  kAvg,
  kCount,
};

bool is_raising(RuleId rule);
bool is_composition(RuleId rule);
std::string_view rule_name(RuleId rule);
std::string_view predicate_name(Predicate predicate);

// Token-index span, half open.
struct Span {
  int start = 0;
  int end = 0;

  bool operator==(const Span&) const = default;
  auto operator<=>(const Span&) const = default;
};

struct DerivationNode;
using NodePtr = std::shared_ptr<const DerivationNode>;

// One tree node (r, s). Children are in span order; for composition nodes
// `swapped` is true when the right child plays the rule's first operand.
struct DerivationNode {
  RuleId rule = RuleId::kLeaf;
  Predicate predicate = Predicate::kNone;
  Span span;
  SymbolInstance result;
  std::vector<NodePtr> children;
  bool swapped = false;
  int token = -1;  // leaf only

  bool is_leaf() const { return rule == RuleId::kLeaf; }
  // First and second operand in rule order.
  const DerivationNode& first_operand() const;
  const DerivationNode& second_operand() const;
};

NodePtr make_leaf(const SymbolInstance& symbol, int token);
NodePtr make_node(RuleId rule, Predicate predicate, Span span, SymbolInstance result,
                  std::vector<NodePtr> children, bool swapped = false);

// A derivation (logic form) over one abstracted utterance.
struct Derivation {
  NodePtr root;

  // Deterministic s-expression; equal trees serialize identically.
  std::string serialize() const;
  // Indented multi-line rendering for humans.
  std::string pretty() const;
  int node_count() const;
  int internal_node_count() const;
  // Pre-order walk.
  void visit(const std::function<void(const DerivationNode&)>& fn) const;
};

std::string serialize_node(const DerivationNode& node);

}  // namespace tq

#endif  // TABLEQUERY_DERIVATION_HPP_
