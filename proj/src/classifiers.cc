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

#include "propaganda/classifiers.h"

#include <algorithm>
#include <cmath>

#include "propaganda/error.h"
#include "propaganda/random.h"
#include "propaganda/text.h"

namespace propaganda {

ClassWeights compute_class_weights(std::span<const long> counts) {
  if (counts.empty()) throw Error("class weights: no classes");
  double total = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] <= 0) {
      throw Error("class weights: class " + std::to_string(c) +
                  " has no training examples");
    }
    total += static_cast<double>(counts[c]);
  }
  ClassWeights w;
  w.values.reserve(counts.size());
  for (long c : counts) w.values.push_back(total / static_cast<double>(c));
  return w;
}

ClassWeights compute_class_weights(const std::map<Technique, long>& counts) {
  std::vector<long> dense(kNumTechniques, 0);
  for (const auto& [t, c] : counts) dense[index_of(t)] = c;
  for (std::size_t i = 0; i < kNumTechniques; ++i) {
    if (dense[i] <= 0) {
      throw Error("class weights: technique " + std::string(kTechniqueLabels[i]) +
                  " has no training examples");
    }
  }
  return compute_class_weights(dense);
}

ClassWeights balanced_class_weights(std::span<const long> counts) {
  ClassWeights w = compute_class_weights(counts);
  for (double& v : w.values) v /= static_cast<double>(counts.size());
  return w;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double mx = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

double softmax_ce_loss(std::span<const double> logits, std::size_t target) {
  if (target >= logits.size()) throw Error("cross-entropy target out of range");
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  return std::log(sum) - (logits[target] - mx);
}

double weighted_ce_loss(std::span<const double> logits, std::size_t target,
                        const ClassWeights& weights) {
  if (weights.size() != logits.size()) throw Error("class weight count mismatch");
  return weights[target] * softmax_ce_loss(logits, target);
}

std::string_view loss_mode_name(LossMode m) {
  return m == LossMode::kPlain ? "plain" : "cost_weighted";
}

LossMode parse_loss_mode(std::string_view name) {
  if (name == "plain") return LossMode::kPlain;
  if (name == "cost_weighted") return LossMode::kCostWeighted;
  throw FormatError("unknown loss '" + std::string(name) +
                    "' (expected plain or cost_weighted)");
}

LinearClassifier::LinearClassifier(std::size_t num_classes, std::size_t input_dim)
    : num_classes_(num_classes),
      input_dim_(input_dim),
      params_(num_classes * (input_dim + 1), 0.0) {
  if (num_classes < 2) throw Error("classifier needs at least two classes");
}

void LinearClassifier::set_parameters(std::vector<double> params) {
  if (params.size() != num_parameters()) throw Error("parameter count mismatch");
  params_ = std::move(params);
}

std::vector<double> LinearClassifier::logits(std::span<const double> input) const {
  if (input.size() != input_dim_) {
    throw Error("input has dim " + std::to_string(input.size()) + ", classifier expects " +
                std::to_string(input_dim_));
  }
  std::vector<double> z(num_classes_);
  const double* bias = params_.data() + num_classes_ * input_dim_;
  for (std::size_t c = 0; c < num_classes_; ++c) {
    const double* row = params_.data() + c * input_dim_;
    double s = bias[c];
    for (std::size_t k = 0; k < input_dim_; ++k) s += row[k] * input[k];
    z[c] = s;
  }
  return z;
}

Prediction LinearClassifier::predict(std::span<const double> input) const {
  Prediction p;
  p.probabilities = softmax(logits(input));
  p.label = static_cast<std::size_t>(
      std::max_element(p.probabilities.begin(), p.probabilities.end()) -
      p.probabilities.begin());
  return p;
}

Checkpoint LinearClassifier::to_checkpoint(std::string kind) const {
  Checkpoint ckpt;
  ckpt.kind = std::move(kind);
  ckpt.set_meta("num_classes", std::to_string(num_classes_));
  ckpt.set_meta("input_dim", std::to_string(input_dim_));
  ckpt.set_meta("l2_C", format_double(l2_C_));
  ckpt.set_meta("trained", trained_ ? "1" : "0");
  Tensor w{"W", num_classes_, input_dim_,
           std::vector<double>(params_.begin(),
                               params_.begin() + static_cast<std::ptrdiff_t>(num_classes_ * input_dim_))};
  Tensor b{"b", 1, num_classes_,
           std::vector<double>(params_.begin() + static_cast<std::ptrdiff_t>(num_classes_ * input_dim_),
                               params_.end())};
  ckpt.tensors.push_back(std::move(w));
  ckpt.tensors.push_back(std::move(b));
  return ckpt;
}

LinearClassifier LinearClassifier::from_checkpoint(const Checkpoint& ckpt) {
  LinearClassifier clf(ckpt.meta_size("num_classes"), ckpt.meta_size("input_dim"));
  clf.l2_C_ = ckpt.meta_double("l2_C");
  clf.trained_ = ckpt.meta_value("trained") == "1";
  const Tensor& w = ckpt.tensor("W");
  const Tensor& b = ckpt.tensor("b");
  if (w.rows != clf.num_classes_ || w.cols != clf.input_dim_ || b.cols != clf.num_classes_) {
    throw FormatError("linear checkpoint tensors do not match its dims");
  }
  std::vector<double> params = w.values;
  params.insert(params.end(), b.values.begin(), b.values.end());
  clf.set_parameters(std::move(params));
  return clf;
}

double linear_objective(std::span<const double> params, const std::vector<Example>& data,
                        std::size_t num_classes, const TrainConfig& config,
                        std::span<double> grad) {
  const std::size_t dim = data.front().input.size();
  const bool weighted = config.loss_mode == LossMode::kCostWeighted;
  const bool want_grad = !grad.empty();
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
  const double* W = params.data();
  const double* b = params.data() + num_classes * dim;

  std::vector<double> z(num_classes);
  double total = 0.0;
  for (const Example& ex : data) {
    for (std::size_t c = 0; c < num_classes; ++c) {
      double s = b[c];
      const double* row = W + c * dim;
      for (std::size_t k = 0; k < dim; ++k) s += row[k] * ex.input[k];
      z[c] = s;
    }
    const double w = weighted ? (*config.class_weights)[ex.label] : 1.0;
    total += w * softmax_ce_loss(z, ex.label);
    if (!want_grad) continue;
    const std::vector<double> p = softmax(z);
    for (std::size_t c = 0; c < num_classes; ++c) {
      const double dz = w * (p[c] - (c == ex.label ? 1.0 : 0.0));
      double* grow = grad.data() + c * dim;
      for (std::size_t k = 0; k < dim; ++k) grow[k] += dz * ex.input[k];
      grad[num_classes * dim + c] += dz;
    }
  }
  const double n = static_cast<double>(data.size());
  const double lambda = std::isinf(config.l2_C) ? 0.0 : 1.0 / config.l2_C;
  double penalty = 0.0;
  for (std::size_t i = 0; i < num_classes * dim; ++i) penalty += W[i] * W[i];
  if (want_grad) {
    for (std::size_t i = 0; i < num_classes * dim; ++i) {
      grad[i] = (grad[i] + lambda * W[i]) / n;
    }
    for (std::size_t c = 0; c < num_classes; ++c) grad[num_classes * dim + c] /= n;
  }
  return (total + 0.5 * lambda * penalty) / n;
}

LinearClassifier train(const std::vector<Example>& data, std::size_t num_classes,
                       const TrainConfig& config, DescentTrace* trace) {
  if (data.empty()) throw Error("train: empty dataset");
  if (!(config.l2_C > 0.0)) throw Error("train: C must be positive");
  const std::size_t dim = data.front().input.size();
  for (const Example& ex : data) {
    if (ex.input.size() != dim) throw Error("train: inconsistent input dims");
    if (ex.label >= num_classes) throw Error("train: label out of range");
  }
  if (config.loss_mode == LossMode::kCostWeighted) {
    if (!config.class_weights || config.class_weights->size() != num_classes) {
      throw Error("train: cost_weighted mode needs one class weight per class");
    }
  }

  LinearClassifier clf(num_classes, dim);
  Rng rng(config.seed);
  std::vector<double> params(clf.num_parameters());
  for (double& p : params) p = rng.uniform(-0.01, 0.01);

  DescentConfig dc;
  dc.initial_step = config.learning_rate;
  dc.max_iters = config.max_iters;
  dc.tolerance = config.tolerance;
  const Objective objective = [&](std::span<const double> x, std::span<double> g) {
    return linear_objective(x, data, num_classes, config, g);
  };
  DescentTrace t = minimize(objective, params, dc);
  if (trace != nullptr) *trace = std::move(t);

  clf.set_parameters(std::move(params));
  clf.trained_ = true;
  clf.l2_C_ = config.l2_C;
  return clf;
}

Standardizer Standardizer::fit(const std::vector<Example>& data,
                               std::vector<std::size_t> columns) {
  Standardizer s;
  s.columns_ = std::move(columns);
  for (std::size_t col : s.columns_) {
    double mean = 0.0;
    for (const Example& ex : data) mean += ex.input.at(col);
    mean /= static_cast<double>(std::max<std::size_t>(data.size(), 1));
    double var = 0.0;
    for (const Example& ex : data) var += (ex.input[col] - mean) * (ex.input[col] - mean);
    var /= static_cast<double>(std::max<std::size_t>(data.size(), 1));
    s.mean_.push_back(mean);
    s.scale_.push_back(var > 0.0 ? std::sqrt(var) : 1.0);
  }
  return s;
}

void Standardizer::apply(std::vector<double>& input) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    input.at(columns_[i]) = (input[columns_[i]] - mean_[i]) / scale_[i];
  }
}

void Standardizer::add_to(Checkpoint& ckpt) const {
  Tensor cols{"standardize_columns", 1, columns_.size(), {}};
  for (std::size_t c : columns_) cols.values.push_back(static_cast<double>(c));
  ckpt.tensors.push_back(std::move(cols));
  ckpt.tensors.push_back({"standardize_mean", 1, mean_.size(), mean_});
  ckpt.tensors.push_back({"standardize_scale", 1, scale_.size(), scale_});
}

Standardizer Standardizer::from_checkpoint(const Checkpoint& ckpt) {
  Standardizer s;
  for (double c : ckpt.tensor("standardize_columns").values) {
    s.columns_.push_back(static_cast<std::size_t>(c));
  }
  s.mean_ = ckpt.tensor("standardize_mean").values;
  s.scale_ = ckpt.tensor("standardize_scale").values;
  if (s.mean_.size() != s.columns_.size() || s.scale_.size() != s.columns_.size()) {
    throw FormatError("standardizer tensors disagree in size");
  }
  return s;
}

std::vector<double> pool_embedding(const EmbeddingSequence& seq) {
  if (seq.rows() == 0) throw Error("pool_embedding: empty sequence");
  const auto row = seq.row(0);
  return std::vector<double>(row.begin(), row.end());
}

}  // namespace propaganda
