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

#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tablequery/harness.hpp"
#include "tablequery/training.hpp"

using namespace tq;

namespace {

const Corpus& synthetic() {
  static const Corpus c = generate_synthetic(builtin_tables(tqt::vocab()), 120, tqt::vocab(), {.seed = 9});
  return c;
}

SqlQuery by_country() {
  SqlQuery q;
  q.select = {{"Country", std::nullopt}, {"Attacks", Aggregator::kSum}};
  q.group_by = {"Country"};
  return q;
}

LossConfig cfg(size_t k, double margin = 0.5) {
  LossConfig c;
  c.margin = margin;
  c.max_negatives = k;
  return c;
}

}  // namespace

TEST_CASE("pairwise loss hand cases") {
  // Positive certain, negative impossible: sum is 1 and the hinge is zero.
  auto r = pairwise_loss({50, -50}, {true, false}, cfg(0));
  CHECK(r.loss == 0.0);
  for (double d : r.dtotal) CHECK(d == 0.0);

  // Uniform over one positive and three negatives: sum is 0, loss = margin.
  r = pairwise_loss({0, 0, 0, 0}, {true, false, false, false}, cfg(3));
  CHECK(r.loss == doctest::Approx(0.5).epsilon(1e-15));

  // Only the two best negatives are kept.
  r = pairwise_loss({0, 3, 2, -1, 1}, {true, false, false, false, false}, cfg(2));
  std::vector<int> kept = r.retained;
  std::sort(kept.begin(), kept.end());
  CHECK(kept == std::vector<int>{0, 1, 2});
  CHECK(r.dtotal[3] == 0.0);
  CHECK(r.dtotal[4] == 0.0);

  // Loss never increases as the positive's score rises.
  double prev = 1e9;
  for (double s = -5; s <= 5; s += 0.25) {
    const double l = pairwise_loss({s, 0.3, -0.2, 1.1}, {true, false, false, false}, cfg(0)).loss;
    CHECK(l <= prev + 1e-15);
    prev = l;
  }

  // Without any negative or positive there is nothing to rank.
  CHECK(pairwise_loss({1, 2}, {true, true}, cfg(2)).loss == 0.0);
}

TEST_CASE("pairwise loss gradient matches central differences") {
  tqt::Rng rng(3);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int inst = 0; inst < 40; ++inst) {
    const size_t n = 3 + rng() % 5;
    std::vector<double> totals(n);
    std::vector<bool> consistent(n, false);
    for (double& t : totals) t = U(rng);
    consistent[0] = true;
    if (rng() % 2) consistent[1] = true;
    for (const LossConfig c : {cfg(0), cfg(2), cfg(0, 2.0)}) {
      const LossResult r = pairwise_loss(totals, consistent, c);
      for (size_t i = 0; i < n; ++i) {
        auto at = [&](double delta) {
          auto t = totals;
          t[i] += delta;
          return pairwise_loss(t, consistent, c).loss;
        };
        const double numeric = (at(1e-6) - at(-1e-6)) / 2e-6;
        CHECK(r.dtotal[i] == doctest::Approx(numeric).epsilon(1e-5).scale(1e-3));
      }
    }
  }
}

TEST_CASE("example loss equals the from-scratch loss") {
  const Corpus& corpus = synthetic();
  int compared = 0;
  for (size_t i = 0; i < corpus.examples.size() && compared < 50; ++i) {
    const CorpusExample& e = corpus.examples[i];
    const TableContext& ctx = corpus.table(e.table);
    const LabeledExample ex = label_candidates(e.question, e.gold, ctx, tqt::vocab());
    if (ex.status != LabelStatus::kOk || ex.truncated) continue;
    SparseModel model;
    model.register_surfaces(ex.batch);
    tqt::Rng rng(i);
    for (double& p : model.params()) p = std::uniform_real_distribution<double>(-0.6, 0.6)(rng);
    for (size_t k : {size_t{0}, size_t{2}}) {
      const double got = example_loss(model, ex, cfg(k));
      const tqt::DirectLoss want = tqt::direct_loss(model, e.question, e.gold, ctx, 0.5, k);
      CAPTURE(e.question);
      CHECK(got == doctest::Approx(want.loss).epsilon(1e-9).scale(1e-9));
      CHECK(ex.positives == want.positives);
    }
    ++compared;
  }
  CHECK(compared == 50);
}

TEST_CASE("example loss gradient matches central differences") {
  const Corpus& corpus = synthetic();
  int checked = 0;
  for (size_t i = 0; i < corpus.examples.size() && checked < 5; ++i) {
    const CorpusExample& e = corpus.examples[i];
    const LabeledExample ex = label_candidates(e.question, e.gold, corpus.table(e.table), tqt::vocab());
    if (ex.status != LabelStatus::kOk) continue;
    NeuralModel model({"<unk>", "<empty>", "T", "C", "V", "N", "D", "by", "of", "in"}, {}, NeuralDims{3, 3, 2});
    model.init_uniform(40 + i, 0.6);
    std::vector<double> grad(model.params().size(), 0.0);
    const double loss = example_loss(model, ex, cfg(0, 5.0), &grad);
    if (loss == 0) continue;
    for (size_t p = 0; p < model.params().size(); p += 7) {
      const double keep = model.params()[p];
      model.params()[p] = keep + 1e-6;
      const double up = example_loss(model, ex, cfg(0, 5.0));
      model.params()[p] = keep - 1e-6;
      const double down = example_loss(model, ex, cfg(0, 5.0));
      model.params()[p] = keep;
      // Relative 1e-4, or 1e-9 absolute at the roundoff floor of the difference.
      CHECK(grad[p] == doctest::Approx((up - down) / 2e-6).epsilon(1e-4).scale(1e-5));
    }
    ++checked;
  }
  CHECK(checked == 5);
}

TEST_CASE("zero loss gives a zero gradient") {
  const Corpus& corpus = synthetic();
  const CorpusExample& e = corpus.examples.front();
  const LabeledExample ex = label_candidates(e.question, e.gold, corpus.table(e.table), tqt::vocab());
  REQUIRE(ex.status == LabelStatus::kOk);
  SparseModel model;
  model.register_surfaces(ex.batch);
  std::vector<double> grad(model.params().size(), 0.0);
  CHECK(example_loss(model, ex, cfg(2, 0.0), &grad) == 0.0);  // margin 0, uniform scores
  for (double g : grad) CHECK(g == 0.0);
}

TEST_CASE("Adam follows the bias-corrected update") {
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  Adam adam(lr, b1, b2, eps);
  std::vector<double> p = {1.0, -2.0, 0.5}, ref = p, m(3, 0.0), v(3, 0.0);
  const std::vector<std::vector<double>> grads = {{0.1, -0.3, 0.0}, {0.2, 0.1, -1.0}, {-0.5, 0.0, 2.0}};
  for (size_t t = 1; t <= grads.size(); ++t) {
    const auto& g = grads[t - 1];
    adam.step(p, g);
    for (size_t i = 0; i < 3; ++i) {
      m[i] = b1 * m[i] + (1 - b1) * g[i];
      v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(b1, t)), vh = v[i] / (1 - std::pow(b2, t));
      ref[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
    for (size_t i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(ref[i]).epsilon(1e-14));
  }
  CHECK(adam.steps() == 3);

  // Minimizes a quadratic.
  Adam q(0.05);
  std::vector<double> x = {3.0, -4.0};
  for (int i = 0; i < 3000; ++i) q.step(x, {2 * (x[0] - 1), 2 * (x[1] + 2)});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(x[1] == doctest::Approx(-2.0).epsilon(1e-3));
}

TEST_CASE("training is deterministic, respects lr = 0 and rejects empty input") {
  const Corpus& corpus = synthetic();
  const auto labeled = label_corpus(corpus.subset({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}), tqt::vocab(), {});
  TrainerConfig tc;
  tc.epochs = 3;
  tc.learning_rate = 0.05;
  tc.seed = 4;
  SparseModel a, b;
  const TrainReport ra = train(a, labeled, {}, tqt::vocab(), tc);
  train(b, labeled, {}, tqt::vocab(), tc);
  CHECK(a.params() == b.params());
  CHECK(ra.epochs.size() == 3);
  CHECK(ra.trainable > 0);
  CHECK(ra.epochs.back().loss <= ra.epochs.front().loss);

  tc.learning_rate = 0;
  SparseModel frozen;
  train(frozen, labeled, {}, tqt::vocab(), tc);
  for (double p : frozen.params()) CHECK(p == 0.0);

  SparseModel none;
  CHECK_THROWS_AS(train(none, {}, {}, tqt::vocab(), tc), TrainingError);
}

TEST_CASE("labeling finds a consistent candidate and rejects bad gold") {
  const TableContext& ctx = tqt::toy("shark_attacks");
  const LabeledExample ex = label_candidates("shark attacks by country", by_country(), ctx, tqt::vocab());
  CHECK(ex.status == LabelStatus::kOk);
  CHECK(ex.positives >= 1);
  CHECK(ex.negatives >= 1);
  CHECK(ex.candidates.size() == static_cast<size_t>(ex.positives + ex.negatives));

  SqlQuery bad = by_country();
  bad.select[1].column = "Injuries";
  CHECK_THROWS_AS(label_candidates("shark attacks by country", bad, ctx, tqt::vocab()), ValidationError);

  SqlQuery far;
  far.select = {{"Species", std::nullopt}};
  far.where = {{{"Activity", CompareOp::kEq, std::string("Surfing")}}};
  CHECK(label_candidates("shark attacks by country", far, ctx, tqt::vocab()).status == LabelStatus::kUnreachable);
  CHECK(label_candidates("hello there", by_country(), ctx, tqt::vocab()).status == LabelStatus::kUnparseable);
}
