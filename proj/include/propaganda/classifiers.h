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

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "propaganda/checkpoint.h"
#include "propaganda/embeddings.h"
#include "propaganda/optimizer.h"
#include "propaganda/technique.h"

namespace propaganda {

// Per-class loss multipliers, indexed by class.
struct ClassWeights {
  std::vector<double> values;

  double operator[](std::size_t c) const { return values[c]; }
  std::size_t size() const { return values.size(); }
};

// w_c = (sum_j count_j) / count_c. Throws Error on any zero count.
ClassWeights compute_class_weights(std::span<const long> counts);
ClassWeights compute_class_weights(const std::map<Technique, long>& counts);

// The "balanced" convention: total / (num_classes * count_c), i.e. the
// weights above scaled so that the per-sample average weight is 1.
ClassWeights balanced_class_weights(std::span<const long> counts);

std::vector<double> softmax(std::span<const double> logits);

// -log softmax(logits)[target], via max subtraction.
double softmax_ce_loss(std::span<const double> logits, std::size_t target);
double weighted_ce_loss(std::span<const double> logits, std::size_t target,
                        const ClassWeights& weights);

enum class LossMode { kPlain, kCostWeighted };

std::string_view loss_mode_name(LossMode m);
LossMode parse_loss_mode(std::string_view name);

struct TrainConfig {
  // Initial backtracking step; grows after accepted steps.
  double learning_rate = 1e-5;
  std::size_t max_iters = 500;
  // Inverse L2 strength: the penalty is ||W||^2 / (2C), bias excluded.
  double l2_C = 1.0;
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  LossMode loss_mode = LossMode::kPlain;
  std::optional<ClassWeights> class_weights;
};

struct Example {
  std::vector<double> input;
  std::size_t label = 0;
};

struct Prediction {
  std::size_t label = 0;
  std::vector<double> probabilities;
};

// Multinomial logistic regression: logits = W x + b.
class LinearClassifier {
 public:
  LinearClassifier() = default;
  LinearClassifier(std::size_t num_classes, std::size_t input_dim);

  std::size_t num_classes() const { return num_classes_; }
  std::size_t input_dim() const { return input_dim_; }
  bool trained() const { return trained_; }
  double l2_C() const { return l2_C_; }

  // W row-major (num_classes x input_dim) followed by b.
  const std::vector<double>& parameters() const { return params_; }
  void set_parameters(std::vector<double> params);
  std::size_t num_parameters() const { return num_classes_ * (input_dim_ + 1); }

  std::vector<double> logits(std::span<const double> input) const;
  // Argmax of the softmax; ties go to the lowest class index.
  Prediction predict(std::span<const double> input) const;

  Checkpoint to_checkpoint(std::string kind) const;
  static LinearClassifier from_checkpoint(const Checkpoint& ckpt);

 private:
  friend LinearClassifier train(const std::vector<Example>&, std::size_t,
                                const TrainConfig&, DescentTrace*);

  std::size_t num_classes_ = 0;
  std::size_t input_dim_ = 0;
  std::vector<double> params_;
  bool trained_ = false;
  double l2_C_ = 1.0;
};

// Training objective at `params` (layout as LinearClassifier::parameters):
//   (1/N) [ sum_i w_{y_i} CE(W x_i + b, y_i) + ||W||^2 / (2C) ]
// with w = 1 in plain mode. Fills `grad` when non-empty.
double linear_objective(std::span<const double> params, const std::vector<Example>& data,
                        std::size_t num_classes, const TrainConfig& config,
                        std::span<double> grad);

// Throws Error on inconsistent dims or labels, TrainingError on divergence.
LinearClassifier train(const std::vector<Example>& data, std::size_t num_classes,
                       const TrainConfig& config, DescentTrace* trace = nullptr);

// Z-scores selected columns with statistics from the training inputs.
class Standardizer {
 public:
  Standardizer() = default;
  static Standardizer fit(const std::vector<Example>& data, std::vector<std::size_t> columns);

  void apply(std::vector<double>& input) const;
  void add_to(Checkpoint& ckpt) const;
  static Standardizer from_checkpoint(const Checkpoint& ckpt);

 private:
  std::vector<std::size_t> columns_;
  std::vector<double> mean_;
  std::vector<double> scale_;
};

// Whole-context representation of a sequence: its row 0.
std::vector<double> pool_embedding(const EmbeddingSequence& seq);

}  // namespace propaganda
