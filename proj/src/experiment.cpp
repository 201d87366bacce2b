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

#include <chrono>
#include <numeric>
#include <random>

#include "tablequery/harness.hpp"

namespace tq {

namespace {

double since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

nlohmann::json train_json(const TrainReport& r) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : r.epochs) epochs.push_back({{"epoch", e.epoch}, {"loss", e.loss}});
  return {{"examples", r.examples},       {"trainable", r.trainable},       {"unreachable", r.unreachable},
          {"unparseable", r.unparseable}, {"no_negatives", r.no_negatives}, {"avg_candidates", r.avg_candidates},
          {"epochs", epochs}};
}

}  // namespace

std::unique_ptr<Model> make_model(ModelKind kind, const ModelConfig& config, const Vocabulary& vocab, uint64_t seed,
                                  const NeuralDims& dims) {
  if (kind == ModelKind::kSparse) return std::make_unique<SparseModel>(config);
  auto m = std::make_unique<NeuralModel>(NeuralModel::token_inventory(vocab), config, dims);
  m->init_uniform(seed);
  return m;
}

CrossValidationReport cross_validate(const Corpus& corpus, const Vocabulary& vocab,
                                     const CrossValidationOptions& options,
                                     const std::function<void(int, const FoldResult&)>& on_fold) {
  if (options.folds < 2) throw std::invalid_argument("cross-validation needs at least two folds");
  if (corpus.examples.size() < static_cast<size_t>(options.folds)) {
    throw std::invalid_argument("fewer examples than folds");
  }
  const auto start = std::chrono::steady_clock::now();
  LabelOptions lo;
  lo.limits = options.limits;
  lo.mode = options.model.mode;
  lo.granularity = options.model.granularity;
  // Labels do not depend on the fold, so every example is labeled once.
  const std::vector<LabeledExample> labeled = label_corpus(corpus, vocab, lo);

  std::vector<size_t> order(corpus.examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.seed);
  std::shuffle(order.begin(), order.end(), rng);

  CrossValidationReport report;
  size_t qm = 0, ex = 0, total = 0;
  for (int f = 0; f < options.folds; ++f) {
    const auto fold_start = std::chrono::steady_clock::now();
    std::vector<size_t> held;
    std::vector<LabeledExample> train_set;
    for (size_t i = 0; i < order.size(); ++i) {
      if (static_cast<int>(i % options.folds) == f) {
        held.push_back(order[i]);
      } else {
        train_set.push_back(labeled[order[i]]);
      }
    }
    auto model = make_model(options.kind, options.model, vocab, options.seed + f, options.dims);
    FoldResult fr;
    fr.train = train(*model, train_set, {}, vocab, options.trainer);
    EvalOptions eo;
    eo.predict.limits = options.limits;
    fr.eval = evaluate(corpus.subset(held), *model, vocab, eo);
    fr.seconds = since(fold_start);
    for (const auto& r : fr.eval.records) {
      qm += r.qm;
      ex += r.ex;
    }
    total += fr.eval.examples;
    if (on_fold) on_fold(f, fr);
    report.folds.push_back(std::move(fr));
  }
  report.acc_qm = static_cast<double>(qm) / static_cast<double>(total);
  report.acc_ex = static_cast<double>(ex) / static_cast<double>(total);
  report.seconds = since(start);
  return report;
}

nlohmann::json CrossValidationReport::to_json() const {
  nlohmann::json folds_json = nlohmann::json::array();
  for (const auto& f : folds) {
    folds_json.push_back({{"train", train_json(f.train)}, {"eval", f.eval.to_json()}, {"seconds", f.seconds}});
  }
  return {{"acc_qm", acc_qm}, {"acc_ex", acc_ex}, {"seconds", seconds}, {"folds", folds_json}};
}

}  // namespace tq
