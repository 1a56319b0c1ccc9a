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

#include "oracles.h"
#include "propaganda/classifiers.h"
#include "propaganda/error.h"
#include "propaganda/random.h"

using namespace propaganda;

TEST_CASE("class weights from the training counts") {
  const ClassWeights w = compute_class_weights(kTrainingCounts);
  CHECK(std::abs(w[index_of(Technique::kLoadedLanguage)] - 6368.0 / 2199.0) < 1e-9);
  CHECK(std::abs(w[index_of(Technique::kBandwagon)] - 6368.0 / 77.0) < 1e-9);
  CHECK(w[0] == doctest::Approx(2.8959).epsilon(1e-4));
  CHECK(w[13] == doctest::Approx(82.70).epsilon(1e-3));

  const std::vector<long> uniform(14, 10);
  for (double v : compute_class_weights(uniform).values) CHECK(v == 14.0);
  std::vector<long> doubled(kTrainingCounts.begin(), kTrainingCounts.end());
  for (long& c : doubled) c *= 2;
  CHECK(compute_class_weights(doubled).values == w.values);

  std::vector<long> zero = doubled;
  zero[3] = 0;
  CHECK_THROWS_AS(compute_class_weights(zero), Error);

  const ClassWeights b = balanced_class_weights(kTrainingCounts);
  for (std::size_t c = 0; c < 14; ++c) CHECK(b[c] == doctest::Approx(w[c] / 14));

  std::map<Technique, long> by_name;
  for (std::size_t i = 0; i < 14; ++i) by_name[technique_at(i)] = kTrainingCounts[i];
  CHECK(compute_class_weights(by_name).values == w.values);
}

TEST_CASE("cross-entropy values") {
  const std::vector<double> zeros(14, 0.0);
  CHECK(std::abs(softmax_ce_loss(zeros, 5) - std::log(14.0)) < 1e-12);
  std::vector<double> sat(14, 0.0);
  sat[2] = 1000;
  CHECK(softmax_ce_loss(sat, 2) < 1e-12);
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> z(5);
    for (double& v : z) v = rng.uniform(-3, 3);
    double denom = 0;
    for (double v : z) denom += std::exp(v);
    CHECK(std::abs(softmax_ce_loss(z, 1) - (std::log(denom) - z[1])) < 1e-12);
  }
  const ClassWeights w = compute_class_weights(kTrainingCounts);
  std::vector<double> z(14);
  for (double& v : z) v = rng.uniform(-2, 2);
  CHECK(weighted_ce_loss(z, 13, w) == doctest::Approx(w[13] * softmax_ce_loss(z, 13)));
  const ClassWeights ones{std::vector<double>(14, 1.0)};
  CHECK(weighted_ce_loss(z, 4, ones) == softmax_ce_loss(z, 4));
}

TEST_CASE("linear objective gradient matches finite differences") {
  Rng rng(5);
  std::vector<Example> data;
  for (int i = 0; i < 6; ++i) {
    Example e;
    for (int d = 0; d < 3; ++d) e.input.push_back(rng.uniform(-1, 1));
    e.label = rng.below(4);
    data.push_back(e);
  }
  for (LossMode mode : {LossMode::kPlain, LossMode::kCostWeighted}) {
    TrainConfig cfg;
    cfg.loss_mode = mode;
    cfg.l2_C = 0.7;
    if (mode == LossMode::kCostWeighted) cfg.class_weights = ClassWeights{{1.0, 2.0, 0.5, 3.0}};
    std::vector<double> p(4 * 4);
    for (double& v : p) v = rng.uniform(-1, 1);
    std::vector<double> g(p.size());
    linear_objective(p, data, 4, cfg, g);
    const auto num = oracle::numeric_gradient(
        [&](const std::vector<double>& x) { return linear_objective(x, data, 4, cfg, {}); }, p);
    CHECK(oracle::relative_error(g, num) < 1e-6);
  }
}

TEST_CASE("separable blobs are learned") {
  Rng rng(9);
  std::vector<Example> data;
  const double centers[3][2] = {{4, 0}, {-4, 0}, {0, 4}};
  for (int i = 0; i < 90; ++i) {
    const std::size_t c = i % 3;
    data.push_back({{centers[c][0] + 0.5 * rng.normal(), centers[c][1] + 0.5 * rng.normal()}, c});
  }
  TrainConfig cfg;
  cfg.max_iters = 500;
  const LinearClassifier clf = train(data, 3, cfg);
  int correct = 0;
  for (const Example& e : data) correct += clf.predict(e.input).label == e.label;
  CHECK(correct / 90.0 >= 0.99);

  const LinearClassifier back = LinearClassifier::from_checkpoint(clf.to_checkpoint("blob"));
  CHECK(back.parameters() == clf.parameters());
}

TEST_CASE("single example loss decreases toward zero") {
  const std::vector<Example> one = {{{1.0, -1.0}, 1}};
  TrainConfig cfg;
  cfg.l2_C = std::numeric_limits<double>::infinity();
  cfg.max_iters = 400;
  DescentTrace trace;
  train(one, 3, cfg, &trace);
  for (std::size_t i = 1; i < trace.loss.size(); ++i) CHECK(trace.loss[i] <= trace.loss[i - 1]);
  CHECK(trace.loss.back() < 1e-2);
}

TEST_CASE("prediction rules") {
  LinearClassifier zero(4, 2);
  zero.set_parameters(std::vector<double>(12, 0.0));
  const Prediction p = zero.predict(std::vector<double>{0.3, -0.2});
  CHECK(p.label == 0);
  for (double v : p.probabilities) CHECK(v == doctest::Approx(0.25));

  LinearClassifier dom(3, 1);
  dom.set_parameters({0, 0, 0, 0, 5, 0});  // bias on class 1
  CHECK(dom.predict(std::vector<double>{1.0}).label == 1);
  dom.set_parameters({0, 0, 0, 7, 12, 7});  // constant shift
  CHECK(dom.predict(std::vector<double>{1.0}).label == 1);
}

TEST_CASE("training input validation") {
  TrainConfig cfg;
  CHECK_THROWS_AS(train({}, 3, cfg), Error);
  CHECK_THROWS_AS(train({{{1.0}, 5}}, 3, cfg), Error);
  CHECK_THROWS_AS(train({{{1.0}, 0}, {{1.0, 2.0}, 1}}, 3, cfg), Error);
  cfg.loss_mode = LossMode::kCostWeighted;
  CHECK_THROWS_AS(train({{{1.0}, 0}}, 3, cfg), Error);  // no weights given
}

TEST_CASE("standardizer and pooling") {
  std::vector<Example> data = {{{1.0, 5.0}, 0}, {{3.0, 7.0}, 1}};
  const Standardizer s = Standardizer::fit(data, {0});
  std::vector<double> x = {3.0, 7.0};
  s.apply(x);
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == 7.0);
  Checkpoint c;
  s.add_to(c);
  std::vector<double> y = {3.0, 7.0};
  Standardizer::from_checkpoint(c).apply(y);
  CHECK(y == x);

  const EmbeddingSequence seq("c", 2, {0.5, 0.25, 1, 2});
  CHECK(pool_embedding(seq) == std::vector<double>{0.5, 0.25});
  CHECK(pool_embedding(seq) == pool_embedding(seq));
}
