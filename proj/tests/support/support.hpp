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

#ifndef TABLEQUERY_TESTS_SUPPORT_HPP_
#define TABLEQUERY_TESTS_SUPPORT_HPP_

// Fixtures and independent oracles shared by the unit tests and the
// acceptance binary.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tablequery/harness.hpp"
#include "tablequery/rules.hpp"
#include "tablequery/scoring.hpp"
#include "tablequery/sql.hpp"
#include "tablequery/training.hpp"

namespace tqt {

using Rng = std::mt19937_64;

// ---- fixtures -------------------------------------------------------------

const tq::Vocabulary& vocab();
// The shipped toy tables (car_sales, jobs, shark_attacks).
const std::map<std::string, std::shared_ptr<const tq::TableContext>>& toy_tables();
const tq::TableContext& toy(const std::string& name);
std::string data_dir();
std::string schema_dir();

// ---- rule oracle ------------------------------------------------------------

// Table 3 written as set expressions over std::set column sets. Operands are
// in rule order; second is null for raising rules.
std::optional<tq::SymbolInstance> oracle_apply(tq::RuleId rule, const tq::SymbolInstance& first,
                                               const tq::SymbolInstance* second);
std::vector<tq::Predicate> oracle_predicates(tq::RuleId rule);
const std::vector<tq::RuleId>& all_rules();

// A well-formed symbol of the given kind over t (any kind when nullopt).
tq::SymbolInstance random_symbol(Rng& rng, const tq::Table& t, std::optional<tq::SymbolKind> kind = {});

struct RuleCase {
  std::string name;
  tq::RuleId rule;
  tq::SymbolInstance first;
  std::optional<tq::SymbolInstance> second;
  std::optional<tq::SymbolInstance> expected;  // nullopt: rejected
};

// One passing case per rule and one rejecting case per precondition.
std::vector<RuleCase> rule_cases();

// ---- parser oracle --------------------------------------------------------

// A random utterance over t with between 1 and max_symbols metadata symbols
// and filler words.
tq::AbstractedUtterance random_utterance(Rng& rng, const tq::TableContext& ctx, int max_symbols);

// Every derivation by exhaustive recursion over split points, using the
// oracle rules; trees in a textual form independent of the library's.
// nullopt when some span holds more than cap trees.
std::optional<std::set<std::string>> brute_force_trees(const tq::AbstractedUtterance& u, size_t cap = 200000);
std::string tree_text(const tq::DerivationNode& node);

// Node scores from a hash of (rule, predicate, span, seed).
class HashScorer : public tq::Scorer {
 public:
  explicit HashScorer(uint64_t seed) : seed_(seed) {}
  std::unique_ptr<tq::NodeScorer> bind(const tq::AbstractedUtterance& u) const override;

 private:
  uint64_t seed_;
};

// ---- SQL ---------------------------------------------------------------------

// A random query that validates against t. Literals come from the table so
// filters select something.
tq::SqlQuery random_query(Rng& rng, const tq::Table& t);
// Same query with select items, conditions, disjunctions, group columns and
// having terms shuffled.
tq::SqlQuery shuffled(Rng& rng, const tq::SqlQuery& q);
// Order-insensitive structural key, built without the library's canonical
// form: two queries are equivalent iff their keys are equal.
std::string structural_key(const tq::SqlQuery& q);
// A random table with str, num and date columns, distinct numbers and a few
// NULL numeric cells.
tq::Table random_table(Rng& rng, const std::string& name);

// Runs sql against t loaded into an in-memory SQLite database; dates are
// stored as ISO text. Rows come back as values with dates as strings.
std::vector<std::vector<tq::Value>> sqlite_rows(const tq::Table& t, const std::string& sql);
// Multiset comparison with dates read as ISO text and numbers within a
// relative 1e-9.
bool same_rows(std::vector<std::vector<tq::Value>> a, std::vector<std::vector<tq::Value>> b);

// ---- loss oracle -------------------------------------------------------------

struct DirectLoss {
  double loss = 0;
  int positives = 0;
  int negatives = 0;  // retained
};

// max(0, alpha - sum_j sum_k (p(z_j+) - p(z_k-))) computed from scratch:
// trees enumerated per utterance and labeled by canonical comparison of
// their interpretation with gold, each tree scored by walking its nodes,
// softmax in long double and the double sum taken literally. Keeps the
// highest scoring max_negatives negatives (all when 0).
DirectLoss direct_loss(const tq::Model& model, const std::string& question, const tq::SqlQuery& gold,
                       const tq::TableContext& ctx, double alpha, size_t max_negatives);

// ---- JSON schema -------------------------------------------------------------

// Validates against the schema subset used by the published schema files:
// type, const, enum, properties, required, additionalProperties, items,
// minItems, maxItems, minimum, minLength, oneOf and local $ref. Returns the
// first violation, empty when valid.
std::string schema_violation(const nlohmann::json& instance, const nlohmann::json& schema);
const nlohmann::json& schema(const std::string& file);

}  // namespace tqt

#endif  // TABLEQUERY_TESTS_SUPPORT_HPP_
