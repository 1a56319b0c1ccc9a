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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "propaganda/checkpoint.h"
#include "propaganda/corpus.h"
#include "propaganda/embeddings.h"
#include "propaganda/optimizer.h"
#include "propaganda/segmentation.h"

namespace propaganda {

// Head stacks on top of precomputed token embeddings:
//   base          start/end output layers read the token embedding only
//   sent          + sentence classifier; its row-0 feature is appended to
//                 every token
//   deep_sep      + per-boundary tanh layers; start reads [H; Hs; Hcls],
//                 end reads [H; He; Hcls]
//   deep_combine  both read [H; Hs; He; Hcls]
enum class HeadVariant { kBase, kSent, kDeepSep, kDeepCombine };

std::string_view variant_name(HeadVariant v);
HeadVariant parse_variant(std::string_view name);

struct HeadConfig {
  HeadVariant variant = HeadVariant::kDeepSep;
  std::size_t embed_dim = 768;
  std::size_t deep_dim = 64;
  std::size_t sent_dim = 64;
  double si_weight = 2.0;                       // minority weight w, >= 1
  std::array<double, 3> alphas = {0.25, 0.5, 0.5};  // sent, start, end
  std::uint64_t seed = 0;

  bool has_sentence_classifier() const { return variant != HeadVariant::kBase; }
  bool has_deep_layers() const {
    return variant == HeadVariant::kDeepSep || variant == HeadVariant::kDeepCombine;
  }
  // Input width of the start and end output layers.
  std::size_t output_width() const;
  void validate() const;
};

// y_sent plus 1-based boundary token indices (present iff has_span).
struct SpanTarget {
  bool has_span = false;
  std::size_t start_idx = 0;
  std::size_t end_idx = 0;
};

// Scores cover every row, so index 0 is the "no boundary" position.
struct HeadOutput {
  std::array<double, 2> sent_logits = {0.0, 0.0};  // (no span, span)
  std::vector<double> start_scores;
  std::vector<double> end_scores;
};

struct LossBreakdown {
  double sent = 0.0;
  double start = 0.0;
  double end = 0.0;
  double total = 0.0;
};

// Cross-entropy of softmax(logits) against y_sent.
double sentence_loss(const std::array<double, 2>& sent_logits, bool y_sent);

// y_sent = 0: -log softmax(scores)[0]. y_sent = 1: -log(w * softmax(scores)[target]).
double boundary_loss(std::span<const double> scores, std::size_t target, bool y_sent,
                     double w);

// alpha_sent * L_sent + alpha_start * L_start + alpha_end * L_end. The
// sentence term is zero for the base variant, which has no sentence head.
LossBreakdown total_loss(const HeadOutput& out, const SpanTarget& target,
                         const HeadConfig& config);

class SpanHeadModel {
 public:
  struct Block {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t offset = 0;
  };

  // Parameters drawn uniformly in +-1/sqrt(fan_in) from config.seed.
  explicit SpanHeadModel(const HeadConfig& config);

  const HeadConfig& config() const { return config_; }
  const std::vector<Block>& layout() const { return layout_; }
  const std::vector<double>& parameters() const { return params_; }
  void set_parameters(std::vector<double> params);

  HeadOutput forward(const EmbeddingSequence& seq) const;
  HeadOutput forward(std::span<const double> params, const EmbeddingSequence& seq) const;

  // Loss for one context at `params`; accumulates d(loss)/d(params) * scale
  // into `grad` when non-empty.
  LossBreakdown loss_and_gradient(std::span<const double> params,
                                  const EmbeddingSequence& seq, const SpanTarget& target,
                                  std::span<double> grad, double scale = 1.0) const;

  Checkpoint to_checkpoint() const;
  static SpanHeadModel from_checkpoint(const Checkpoint& ckpt);

 private:
  LossBreakdown loss_and_gradient(std::span<const double> params,
                                  const EmbeddingSequence& seq, const SpanTarget& target,
                                  std::span<double> grad, double scale,
                                  HeadOutput* forward_only) const;

  const Block* block(std::string_view name) const;

  HeadConfig config_;
  std::vector<Block> layout_;
  std::vector<double> params_;
};

struct HeadExample {
  EmbeddingSequence embedding;
  SpanTarget target;
};

struct HeadTrainConfig {
  double learning_rate = 1e-5;
  std::size_t max_iters = 300;
  double tolerance = 1e-6;
  // Finite-difference check of a few coordinates before the first step.
  bool gradient_check = true;
};

struct HeadTrainResult {
  DescentTrace trace;
  LossBreakdown final_loss;  // mean components at the final parameters
};

SpanHeadModel train_heads(const std::vector<HeadExample>& data, const HeadConfig& config,
                          const HeadTrainConfig& train_config,
                          HeadTrainResult* result = nullptr);

// Mean loss components of `model` over `data`.
LossBreakdown evaluate_loss(const SpanHeadModel& model, const std::vector<HeadExample>& data);

// Target for a context: the gold span snapped outward to tokens. A gold span
// that covers no (kept) token yields a no-span target.
SpanTarget target_for_context(const Context& context, const TokenAlignment& alignment);

struct DecodedSpans {
  std::vector<TokenSpan> candidates;  // 0..2 (start-first, end-first)
  std::vector<TokenSpan> spans;       // candidates with overlaps merged
};

// Sorts inclusive token spans and fuses the ones sharing a token.
std::vector<TokenSpan> merge_token_spans(std::vector<TokenSpan> spans);

// Empty when the sentence head says "no span" and both boundary argmaxes
// sit on position 0. Otherwise candidate A takes the best start s* and the
// best end at or after it, candidate B the best end e* and the best start
// at or before it; overlapping candidates are merged.
DecodedSpans decode_span(const HeadOutput& out);

// Article-level char span covered by tokens [span.start, span.end].
SpanAnnotation token_span_to_char(const TokenAlignment& alignment, TokenSpan span,
                                  const Context& context);

}  // namespace propaganda
