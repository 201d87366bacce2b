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

#include "tablequery/pipeline.hpp"

namespace tq {

std::shared_ptr<const TableContext> make_context(std::string id, std::shared_ptr<const Table> table,
                                                 const Vocabulary& vocab, SynonymDict synonyms) {
  auto ctx = std::make_shared<TableContext>();
  ctx->id = std::move(id);
  ctx->index = std::make_shared<TableIndex>(table, vocab.normalizer_ptr());
  ctx->table = std::move(table);
  ctx->synonyms = std::move(synonyms);
  return ctx;
}

std::string_view failure_name(Prediction::Failure f) {
  switch (f) {
    case Prediction::Failure::kNone: return "none";
    case Prediction::Failure::kNothingToParse: return "nothing-to-parse";
    case Prediction::Failure::kNoParse: return "no-parse";
    case Prediction::Failure::kInterpretation: return "interpretation";
  }
  return "?";
}

Prediction predict(std::string_view question, const TableContext& ctx, const Vocabulary& vocab, const Scorer& scorer,
                   const PredictOptions& options) {
  Prediction out;
  out.utterances = abstract_question(question, *ctx.index, vocab, ctx.synonyms);
  out.utterance_scores.resize(out.utterances.size());
  bool any_symbols = false;
  double best = 0;
  for (size_t i = 0; i < out.utterances.size(); ++i) {
    const auto& u = out.utterances[i];
    try {
      ParseBestResult r = parse_best(u, scorer, options.limits);
      any_symbols = true;
      out.utterance_scores[i] = r.score;
      const double s = r.score + (options.weigh_annotation ? u.annotation_score : 0.0);
      if (out.chosen < 0 || s > best) {
        best = s;
        out.chosen = static_cast<int>(i);
        out.derivation = std::move(r.derivation);
        out.score = r.score;
      }
    } catch (const ParseError& e) {
      if (e.kind() == ParseError::Kind::kNoValidTree) any_symbols = true;
    }
  }
  if (out.chosen < 0) {
    out.failure = any_symbols ? Prediction::Failure::kNoParse : Prediction::Failure::kNothingToParse;
    out.error = any_symbols ? "no valid derivation for any abstraction" : "nothing in the question links to the table";
    return out;
  }
  try {
    out.sql = interpret(*out.derivation, *ctx.table);
  } catch (const InterpretationError& e) {
    out.failure = Prediction::Failure::kInterpretation;
    out.error = e.what();
  }
  return out;
}

}  // namespace tq
