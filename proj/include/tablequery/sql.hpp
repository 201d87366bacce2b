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

#ifndef TABLEQUERY_SQL_HPP_
#define TABLEQUERY_SQL_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tablequery/table.hpp"
#include "tablequery/value.hpp"

namespace tq {

enum class Aggregator : uint8_t { kMin, kMax, kSum, kAvg, kCount };
enum class CompareOp : uint8_t { kEq, kGt, kLt, kGe, kLe };

std::string_view aggregator_name(Aggregator agg);  // MIN, MAX, ...
std::optional<Aggregator> parse_aggregator(std::string_view name);
std::string_view compare_op_text(CompareOp op);  // =, >, ...

struct SelectItem {
  std::string column;
  std::optional<Aggregator> agg;
};

struct Condition {
  std::string column;
  CompareOp op = CompareOp::kEq;
  Value literal;
};

struct HavingCondition {
  Aggregator agg = Aggregator::kSum;
  std::string column;
  CompareOp op = CompareOp::kEq;
  Value literal;
};

// ORDER BY <column or aggregate> ASC|DESC LIMIT <limit>.
struct Superlative {
  std::string column;
  std::optional<Aggregator> agg;
  bool descending = true;
  int limit = 1;
};

// Conjunction of disjunctions. Boolean structure is flattened to one
// and-group whose members are or-groups of atomic conditions.
using Disjunction = std::vector<Condition>;
using WhereClause = std::vector<Disjunction>;

// The single-table query language: an empty select list means SELECT *.
struct SqlQuery {
  std::vector<SelectItem> select;
  WhereClause where;
  std::vector<std::string> group_by;
  std::vector<HavingCondition> having;
  std::optional<Superlative> superlative;

  bool is_aggregated() const;
};

// (a) AND (b), (a) OR (b) kept in conjunctive normal form.
WhereClause cnf_and(const WhereClause& a, const WhereClause& b);
WhereClause cnf_or(const WhereClause& a, const WhereClause& b);

// Structural invariants that do not need the table.
void validate_structure(const SqlQuery& q);
// All invariants, including column existence and aggregator/type legality.
void validate(const SqlQuery& q, const Table& t);

// Normal form for equivalence testing; equal text iff equivalent up to
// ordering of select items, conditions, group columns and having terms.
struct CanonicalSql {
  std::string text;
  bool operator==(const CanonicalSql&) const = default;
};

CanonicalSql canonicalize(const SqlQuery& q);

enum class SqlDialect { kGeneric };

std::string render_sql(const SqlQuery& q, std::string_view table_name = "t",
                       SqlDialect dialect = SqlDialect::kGeneric);
std::string render_literal(const Value& v);
std::string render_identifier(std::string_view name);

class SqlSyntaxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses the dialect produced by render_sql. Quoted literals stay strings
// until bind_to_table coerces them to the column type.
SqlQuery parse_sql(std::string_view text);

// Resolves column names to the table's spelling, coerces literals to the
// column types and validates.
SqlQuery bind_to_table(SqlQuery q, const Table& t);

}  // namespace tq

#endif  // TABLEQUERY_SQL_HPP_
