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

#ifndef TABLEQUERY_BACKEND_HPP_
#define TABLEQUERY_BACKEND_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "tablequery/derivation.hpp"
#include "tablequery/sql.hpp"
#include "tablequery/table.hpp"

namespace tq {

class InterpretationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ExecutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Maps a derivation to SQL by a pre-order walk of its nodes:
//   T leaf            SELECT *
//   C / A             bare columns / aggregates on the columns
//   A|G + C [group]   GROUP BY the C columns, selecting them and the aggregates
//   C + V|D, C + N    one WHERE condition; V|D raised to F is an OR over its columns
//   F + F [and|or]    boolean combination (kept in CNF)
//   A|C1 + C2 [arg*]  ORDER BY C2 DESC|ASC LIMIT 1, selecting C1 (or A)
//   X + T [project]   the select list of X over the table context of T
//   F + T [filter]    WHERE, or HAVING for a numeric condition on a column
//                     aggregated in a grouped context
//   X + F [modify]    conditions of F attached to X
//   combine           concatenated select lists
// In an aggregated context a bare column resolves to its aggregate.
SqlQuery interpret(const Derivation& d, const Table& t);

// Query result; rows are compared as a multiset.
struct ResultTable {
  std::vector<std::string> headers;
  std::vector<std::vector<Value>> rows;
};

// WHERE, then grouping and aggregation, HAVING, superlative, projection.
// SUM/AVG/MIN/MAX over no values are NULL; COUNT counts non-NULL cells.
// String equality compares normalized text; dates compare on their common
// prefix.
ResultTable execute(const SqlQuery& q, const Table& t);

// Multiset equality of rows; numbers equal within a relative 1e-9.
bool results_equal(const ResultTable& a, const ResultTable& b);

std::string result_to_csv(const ResultTable& r);

}  // namespace tq

#endif  // TABLEQUERY_BACKEND_HPP_
