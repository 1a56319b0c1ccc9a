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

#include "propaganda/span_heads.h"

#include <algorithm>
#include <cmath>

#include "propaganda/classifiers.h"
#include "propaganda/error.h"
#include "propaganda/random.h"
#include "propaganda/text.h"

namespace propaganda {
namespace {

std::size_t argmax(std::span<const double> v, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

// y = tanh(W x + b) for a (rows x cols) W at `w` followed by b.
void dense_tanh(const double* w, const double* b, std::size_t rows, std::size_t cols,
                std::span<const double> x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    double s = b[r];
    const double* wr = w + r * cols;
    for (std::size_t k = 0; k < cols; ++k) s += wr[k] * x[k];
    y[r] = std::tanh(s);
  }
}

// Intermediate activations of one forward pass.
struct Activations {
  std::vector<double> h_cls;    // sent_dim
  std::vector<double> h_start;  // rows x deep_dim
  std::vector<double> h_end;    // rows x deep_dim
  HeadOutput out;
};

}  // namespace

std::string_view variant_name(HeadVariant v) {
  switch (v) {
    case HeadVariant::kBase: return "base";
    case HeadVariant::kSent: return "sent";
    case HeadVariant::kDeepSep: return "deep_sep";
    case HeadVariant::kDeepCombine: return "deep_combine";
  }
  return "?";
}

HeadVariant parse_variant(std::string_view name) {
  if (name == "base") return HeadVariant::kBase;
  if (name == "sent") return HeadVariant::kSent;
  if (name == "deep_sep") return HeadVariant::kDeepSep;
  if (name == "deep_combine") return HeadVariant::kDeepCombine;
  throw FormatError("unknown head variant '" + std::string(name) +
                    "' (expected base, sent, deep_sep or deep_combine)");
}

std::size_t HeadConfig::output_width() const {
  switch (variant) {
    case HeadVariant::kBase: return embed_dim;
    case HeadVariant::kSent: return embed_dim + sent_dim;
    case HeadVariant::kDeepSep: return embed_dim + deep_dim + sent_dim;
    case HeadVariant::kDeepCombine: return embed_dim + 2 * deep_dim + sent_dim;
  }
  return 0;
}

void HeadConfig::validate() const {
  if (embed_dim == 0 || deep_dim == 0 || sent_dim == 0) {
    throw Error("head dims must be positive");
  }
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw Error("loss alphas must be finite and >= 0");
  }
  if (alphas[1] + alphas[2] <= 0.0) throw Error("at least one boundary alpha must be positive");
  if (!(si_weight >= 1.0)) throw Error("SI minority weight must be >= 1");
}

double sentence_loss(const std::array<double, 2>& sent_logits, bool y_sent) {
  return softmax_ce_loss(sent_logits, y_sent ? 1 : 0);
}

double boundary_loss(std::span<const double> scores, std::size_t target, bool y_sent,
                     double w) {
  if (!y_sent) return softmax_ce_loss(scores, 0);
  if (target < 1 || target >= scores.size()) {
    throw Error("boundary target " + std::to_string(target) + " outside 1.." +
                std::to_string(scores.size() - 1));
  }
  // -log(w * p) = -log p - log w
  return softmax_ce_loss(scores, target) - std::log(w);
}

LossBreakdown total_loss(const HeadOutput& out, const SpanTarget& target,
                         const HeadConfig& config) {
  LossBreakdown l;
  if (config.has_sentence_classifier()) l.sent = sentence_loss(out.sent_logits, target.has_span);
  l.start = boundary_loss(out.start_scores, target.start_idx, target.has_span, config.si_weight);
  l.end = boundary_loss(out.end_scores, target.end_idx, target.has_span, config.si_weight);
  l.total = config.alphas[0] * l.sent + config.alphas[1] * l.start + config.alphas[2] * l.end;
  return l;
}

SpanHeadModel::SpanHeadModel(const HeadConfig& config) : config_(config) {
  config_.validate();
  const std::size_t d = config_.embed_dim;
  const std::size_t width = config_.output_width();
  std::size_t offset = 0;
  const auto add = [&](std::string name, std::size_t rows, std::size_t cols) {
    layout_.push_back({std::move(name), rows, cols, offset});
    offset += rows * cols;
  };
  if (config_.has_sentence_classifier()) {
    add("sent_hidden_w", config_.sent_dim, d);
    add("sent_hidden_b", 1, config_.sent_dim);
    add("sent_out_w", 2, config_.sent_dim);
    add("sent_out_b", 1, 2);
  }
  if (config_.has_deep_layers()) {
    add("start_hidden_w", config_.deep_dim, d);
    add("start_hidden_b", 1, config_.deep_dim);
    add("end_hidden_w", config_.deep_dim, d);
    add("end_hidden_b", 1, config_.deep_dim);
  }
  add("start_out_w", 1, width);
  add("start_out_b", 1, 1);
  add("end_out_w", 1, width);
  add("end_out_b", 1, 1);

  params_.resize(offset);
  Rng rng(config_.seed);
  for (const Block& b : layout_) {
    // Biases use the fan-in of their weight matrix.
    const bool is_bias = b.name.ends_with("_b");
    const std::size_t fan_in = is_bias ? (b.name.starts_with("sent_out") ? config_.sent_dim
                                          : b.name.find("hidden") != std::string::npos ? d
                                                                                        : width)
                                       : b.cols;
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < b.rows * b.cols; ++i) {
      params_[b.offset + i] = rng.uniform(-scale, scale);
    }
  }
}

const SpanHeadModel::Block* SpanHeadModel::block(std::string_view name) const {
  for (const Block& b : layout_) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

void SpanHeadModel::set_parameters(std::vector<double> params) {
  if (params.size() != params_.size()) throw Error("span head parameter count mismatch");
  params_ = std::move(params);
}

HeadOutput SpanHeadModel::forward(const EmbeddingSequence& seq) const {
  return forward(params_, seq);
}

namespace {

// Offsets of every parameter block for one variant, resolved once per pass.
struct Offsets {
  const double* sent_hw = nullptr;
  const double* sent_hb = nullptr;
  const double* sent_ow = nullptr;
  const double* sent_ob = nullptr;
  const double* start_hw = nullptr;
  const double* start_hb = nullptr;
  const double* end_hw = nullptr;
  const double* end_hb = nullptr;
  const double* start_ow = nullptr;
  const double* start_ob = nullptr;
  const double* end_ow = nullptr;
  const double* end_ob = nullptr;
};

}  // namespace

HeadOutput SpanHeadModel::forward(std::span<const double> params,
                                  const EmbeddingSequence& seq) const {
  HeadOutput out;
  loss_and_gradient(params, seq, SpanTarget{}, {}, 1.0, &out);
  return out;
}

LossBreakdown SpanHeadModel::loss_and_gradient(std::span<const double> params,
                                               const EmbeddingSequence& seq,
                                               const SpanTarget& target,
                                               std::span<double> grad, double scale) const {
  return loss_and_gradient(params, seq, target, grad, scale, nullptr);
}

LossBreakdown SpanHeadModel::loss_and_gradient(std::span<const double> params,
                                               const EmbeddingSequence& seq,
                                               const SpanTarget& target,
                                               std::span<double> grad, double scale,
                                               HeadOutput* forward_only) const {
  const HeadConfig& cfg = config_;
  const std::size_t d = cfg.embed_dim;
  if (seq.dim() != d) {
    throw Error("context " + seq.context_id() + ": embedding dim " +
                std::to_string(seq.dim()) + " != model dim " + std::to_string(d));
  }
  if (params.size() != params_.size()) throw Error("span head parameter count mismatch");
  const std::size_t rows = seq.rows();
  if (rows < 2) throw Error("context " + seq.context_id() + " has no content tokens");

  const auto at = [&](std::string_view name) -> const double* {
    const Block* b = block(name);
    return b == nullptr ? nullptr : params.data() + b->offset;
  };
  const auto grad_at = [&](std::string_view name) -> double* {
    return grad.data() + block(name)->offset;
  };
  Offsets o;
  o.sent_hw = at("sent_hidden_w");
  o.sent_hb = at("sent_hidden_b");
  o.sent_ow = at("sent_out_w");
  o.sent_ob = at("sent_out_b");
  o.start_hw = at("start_hidden_w");
  o.start_hb = at("start_hidden_b");
  o.end_hw = at("end_hidden_w");
  o.end_hb = at("end_hidden_b");
  o.start_ow = at("start_out_w");
  o.start_ob = at("start_out_b");
  o.end_ow = at("end_out_w");
  o.end_ob = at("end_out_b");

  const bool sent = cfg.has_sentence_classifier();
  const bool deep = cfg.has_deep_layers();
  const bool combine = cfg.variant == HeadVariant::kDeepCombine;
  const std::size_t sd = cfg.sent_dim;
  const std::size_t dd = cfg.deep_dim;
  const std::size_t width = cfg.output_width();

  // Forward.
  HeadOutput out;
  std::vector<double> h_cls(sent ? sd : 0);
  if (sent) {
    dense_tanh(o.sent_hw, o.sent_hb, sd, d, seq.row(0), h_cls.data());
    for (std::size_t c = 0; c < 2; ++c) {
      double s = o.sent_ob[c];
      for (std::size_t k = 0; k < sd; ++k) s += o.sent_ow[c * sd + k] * h_cls[k];
      out.sent_logits[c] = s;
    }
  }
  std::vector<double> hs(deep ? rows * dd : 0);
  std::vector<double> he(deep ? rows * dd : 0);
  if (deep) {
    for (std::size_t i = 0; i < rows; ++i) {
      dense_tanh(o.start_hw, o.start_hb, dd, d, seq.row(i), hs.data() + i * dd);
      dense_tanh(o.end_hw, o.end_hb, dd, d, seq.row(i), he.data() + i * dd);
    }
  }
  // Concatenated output-layer input for row i: [H_i; deep parts; h_cls].
  const auto build_input = [&](std::size_t i, bool for_start, std::vector<double>& x) {
    x.clear();
    const auto h = seq.row(i);
    x.insert(x.end(), h.begin(), h.end());
    if (deep) {
      if (combine || for_start) x.insert(x.end(), hs.begin() + i * dd, hs.begin() + (i + 1) * dd);
      if (combine || !for_start) x.insert(x.end(), he.begin() + i * dd, he.begin() + (i + 1) * dd);
    }
    x.insert(x.end(), h_cls.begin(), h_cls.end());
  };
  std::vector<std::vector<double>> xs(rows);
  std::vector<std::vector<double>> xe(rows);
  out.start_scores.resize(rows);
  out.end_scores.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    build_input(i, true, xs[i]);
    if (combine) xe[i] = xs[i];
    else build_input(i, false, xe[i]);
    double s = o.start_ob[0];
    double e = o.end_ob[0];
    for (std::size_t k = 0; k < width; ++k) {
      s += o.start_ow[k] * xs[i][k];
      e += o.end_ow[k] * xe[i][k];
    }
    out.start_scores[i] = s;
    out.end_scores[i] = e;
  }
  if (forward_only != nullptr) {
    *forward_only = std::move(out);
    return {};
  }

  const LossBreakdown loss = total_loss(out, target, cfg);
  if (grad.empty()) return loss;

  // Backward. Output-layer score gradients: alpha * (softmax - onehot); the
  // -log w offset of the weighted branch is constant and has no gradient.
  const auto score_grad = [&](const std::vector<double>& scores, std::size_t tgt, double alpha) {
    std::vector<double> g = softmax(scores);
    g[tgt] -= 1.0;
    for (double& v : g) v *= alpha * scale;
    return g;
  };
  const std::size_t ts = target.has_span ? target.start_idx : 0;
  const std::size_t te = target.has_span ? target.end_idx : 0;
  const std::vector<double> gs = score_grad(out.start_scores, ts, cfg.alphas[1]);
  const std::vector<double> ge = score_grad(out.end_scores, te, cfg.alphas[2]);

  double* g_sow = grad_at("start_out_w");
  double* g_sob = grad_at("start_out_b");
  double* g_eow = grad_at("end_out_w");
  double* g_eob = grad_at("end_out_b");
  std::vector<double> dh_cls(sd, 0.0);
  std::vector<double> dhs(deep ? rows * dd : 0, 0.0);
  std::vector<double> dhe(deep ? rows * dd : 0, 0.0);
  const std::size_t cls_off = width - (sent ? sd : 0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < width; ++k) {
      g_sow[k] += gs[i] * xs[i][k];
      g_eow[k] += ge[i] * xe[i][k];
    }
    g_sob[0] += gs[i];
    g_eob[0] += ge[i];
    if (deep) {
      for (std::size_t k = 0; k < dd; ++k) {
        // start input: [H; Hs; (He;) cls], end input: [H; (Hs;) He; cls]
        dhs[i * dd + k] += gs[i] * o.start_ow[d + k];
        if (combine) {
          dhe[i * dd + k] += gs[i] * o.start_ow[d + dd + k];
          dhs[i * dd + k] += ge[i] * o.end_ow[d + k];
          dhe[i * dd + k] += ge[i] * o.end_ow[d + dd + k];
        } else {
          dhe[i * dd + k] += ge[i] * o.end_ow[d + k];
        }
      }
    }
    for (std::size_t k = 0; k < (sent ? sd : 0); ++k) {
      dh_cls[k] += gs[i] * o.start_ow[cls_off + k] + ge[i] * o.end_ow[cls_off + k];
    }
  }
  if (deep) {
    double* g_shw = grad_at("start_hidden_w");
    double* g_shb = grad_at("start_hidden_b");
    double* g_ehw = grad_at("end_hidden_w");
    double* g_ehb = grad_at("end_hidden_b");
    for (std::size_t i = 0; i < rows; ++i) {
      const auto h = seq.row(i);
      for (std::size_t r = 0; r < dd; ++r) {
        const double zs = dhs[i * dd + r] * (1.0 - hs[i * dd + r] * hs[i * dd + r]);
        const double ze = dhe[i * dd + r] * (1.0 - he[i * dd + r] * he[i * dd + r]);
        g_shb[r] += zs;
        g_ehb[r] += ze;
        for (std::size_t k = 0; k < d; ++k) {
          g_shw[r * d + k] += zs * h[k];
          g_ehw[r * d + k] += ze * h[k];
        }
      }
    }
  }
  if (sent) {
    std::vector<double> gsent = softmax(out.sent_logits);
    gsent[target.has_span ? 1 : 0] -= 1.0;
    double* g_sow2 = grad_at("sent_out_w");
    double* g_sob2 = grad_at("sent_out_b");
    for (std::size_t c = 0; c < 2; ++c) {
      const double g = gsent[c] * cfg.alphas[0] * scale;
      g_sob2[c] += g;
      for (std::size_t k = 0; k < sd; ++k) {
        g_sow2[c * sd + k] += g * h_cls[k];
        dh_cls[k] += g * o.sent_ow[c * sd + k];
      }
    }
    double* g_shw = grad_at("sent_hidden_w");
    double* g_shb = grad_at("sent_hidden_b");
    const auto h0 = seq.row(0);
    for (std::size_t r = 0; r < sd; ++r) {
      const double z = dh_cls[r] * (1.0 - h_cls[r] * h_cls[r]);
      g_shb[r] += z;
      for (std::size_t k = 0; k < d; ++k) g_shw[r * d + k] += z * h0[k];
    }
  }
  return loss;
}

Checkpoint SpanHeadModel::to_checkpoint() const {
  Checkpoint ckpt;
  ckpt.kind = "span_heads";
  ckpt.set_meta("variant", std::string(variant_name(config_.variant)));
  ckpt.set_meta("embed_dim", std::to_string(config_.embed_dim));
  ckpt.set_meta("deep_dim", std::to_string(config_.deep_dim));
  ckpt.set_meta("sent_dim", std::to_string(config_.sent_dim));
  ckpt.set_meta("si_weight", format_double(config_.si_weight));
  ckpt.set_meta("alpha_sent", format_double(config_.alphas[0]));
  ckpt.set_meta("alpha_start", format_double(config_.alphas[1]));
  ckpt.set_meta("alpha_end", format_double(config_.alphas[2]));
  ckpt.set_meta("seed", std::to_string(config_.seed));
  for (const Block& b : layout_) {
    ckpt.tensors.push_back(
        {b.name, b.rows, b.cols,
         std::vector<double>(params_.begin() + static_cast<std::ptrdiff_t>(b.offset),
                             params_.begin() + static_cast<std::ptrdiff_t>(b.offset + b.rows * b.cols))});
  }
  return ckpt;
}

SpanHeadModel SpanHeadModel::from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.kind != "span_heads") throw FormatError("not a span_heads checkpoint: " + ckpt.kind);
  HeadConfig cfg;
  cfg.variant = parse_variant(ckpt.meta_value("variant"));
  cfg.embed_dim = ckpt.meta_size("embed_dim");
  cfg.deep_dim = ckpt.meta_size("deep_dim");
  cfg.sent_dim = ckpt.meta_size("sent_dim");
  cfg.si_weight = ckpt.meta_double("si_weight");
  cfg.alphas = {ckpt.meta_double("alpha_sent"), ckpt.meta_double("alpha_start"),
                ckpt.meta_double("alpha_end")};
  cfg.seed = ckpt.meta_size("seed");
  SpanHeadModel model(cfg);
  std::vector<double> params(model.params_.size());
  for (const Block& b : model.layout_) {
    const Tensor& t = ckpt.tensor(b.name);
    if (t.rows != b.rows || t.cols != b.cols) {
      throw FormatError("tensor " + b.name + " has the wrong shape for this variant");
    }
    std::copy(t.values.begin(), t.values.end(),
              params.begin() + static_cast<std::ptrdiff_t>(b.offset));
  }
  model.set_parameters(std::move(params));
  return model;
}

LossBreakdown evaluate_loss(const SpanHeadModel& model, const std::vector<HeadExample>& data) {
  LossBreakdown sum;
  for (const HeadExample& ex : data) {
    const LossBreakdown l =
        model.loss_and_gradient(model.parameters(), ex.embedding, ex.target, {});
    sum.sent += l.sent;
    sum.start += l.start;
    sum.end += l.end;
    sum.total += l.total;
  }
  const double n = static_cast<double>(std::max<std::size_t>(data.size(), 1));
  sum.sent /= n;
  sum.start /= n;
  sum.end /= n;
  sum.total /= n;
  return sum;
}

namespace {

void check_gradient(const SpanHeadModel& model, const HeadExample& ex, std::uint64_t seed) {
  std::vector<double> params = model.parameters();
  std::vector<double> grad(params.size(), 0.0);
  model.loss_and_gradient(params, ex.embedding, ex.target, grad);
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  constexpr double kStep = 1e-5;
  for (int probe = 0; probe < 16; ++probe) {
    const std::size_t i = rng.below(params.size());
    const double saved = params[i];
    params[i] = saved + kStep;
    const double up = model.loss_and_gradient(params, ex.embedding, ex.target, {}).total;
    params[i] = saved - kStep;
    const double down = model.loss_and_gradient(params, ex.embedding, ex.target, {}).total;
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * kStep);
    if (std::abs(numeric - grad[i]) > 1e-6 + 1e-4 * (std::abs(numeric) + std::abs(grad[i]))) {
      throw Error("span head gradient check failed at parameter " + std::to_string(i) +
                  ": analytic " + format_double(grad[i]) + " vs numeric " +
                  format_double(numeric));
    }
  }
}

}  // namespace

SpanHeadModel train_heads(const std::vector<HeadExample>& data, const HeadConfig& config,
                          const HeadTrainConfig& train_config, HeadTrainResult* result) {
  if (data.empty()) throw Error("train_heads: no contexts");
  SpanHeadModel model(config);
  if (train_config.gradient_check) check_gradient(model, data.front(), config.seed);

  const double inv_n = 1.0 / static_cast<double>(data.size());
  const Objective objective = [&](std::span<const double> x, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
    double total = 0.0;
    for (const HeadExample& ex : data) {
      total += model.loss_and_gradient(x, ex.embedding, ex.target, g, inv_n).total;
    }
    return total * inv_n;
  };
  std::vector<double> params = model.parameters();
  DescentConfig dc;
  dc.initial_step = train_config.learning_rate;
  dc.max_iters = train_config.max_iters;
  dc.tolerance = train_config.tolerance;
  DescentTrace trace = minimize(objective, params, dc);
  model.set_parameters(std::move(params));
  if (result != nullptr) {
    result->trace = std::move(trace);
    result->final_loss = evaluate_loss(model, data);
  }
  return model;
}

SpanTarget target_for_context(const Context& context, const TokenAlignment& alignment) {
  SpanTarget target;
  if (!context.gold_span) return target;
  try {
    const TokenSpan ts =
        char_span_to_token_span(alignment, context.gold_span->start, context.gold_span->end);
    target.has_span = true;
    target.start_idx = ts.start;
    target.end_idx = ts.end;
  } catch (const Error&) {
    // Whitespace-only or truncated-away gold span.
  }
  return target;
}

std::vector<TokenSpan> merge_token_spans(std::vector<TokenSpan> spans) {
  std::sort(spans.begin(), spans.end(), [](const TokenSpan& a, const TokenSpan& b) {
    return a.start != b.start ? a.start < b.start : a.end < b.end;
  });
  std::vector<TokenSpan> out;
  for (const TokenSpan& c : spans) {
    // Inclusive spans: sharing a token counts as overlap.
    if (!out.empty() && c.start <= out.back().end) {
      out.back().end = std::max(out.back().end, c.end);
    } else {
      out.push_back(c);
    }
  }
  return out;
}

DecodedSpans decode_span(const HeadOutput& out) {
  DecodedSpans decoded;
  const std::size_t rows = out.start_scores.size();
  if (rows < 2 || out.end_scores.size() != rows) return decoded;
  const bool sent_says_none = out.sent_logits[0] >= out.sent_logits[1];
  if (sent_says_none && argmax(out.start_scores, 0, rows) == 0 &&
      argmax(out.end_scores, 0, rows) == 0) {
    return decoded;
  }
  const std::size_t s_star = argmax(out.start_scores, 1, rows);
  const std::size_t e_given_s = argmax(out.end_scores, s_star, rows);
  const std::size_t e_star = argmax(out.end_scores, 1, rows);
  const std::size_t s_given_e = argmax(out.start_scores, 1, e_star + 1);
  decoded.candidates.push_back({s_star, e_given_s});
  decoded.candidates.push_back({s_given_e, e_star});

  decoded.spans = merge_token_spans(decoded.candidates);
  if (decoded.candidates[0] == decoded.candidates[1]) decoded.candidates.pop_back();
  return decoded;
}

SpanAnnotation token_span_to_char(const TokenAlignment& alignment, TokenSpan span,
                                  const Context& context) {
  if (span.start < 1 || span.start > span.end || span.end > alignment.token_spans.size()) {
    throw Error("token span (" + std::to_string(span.start) + "," + std::to_string(span.end) +
                ") invalid for context " + alignment.context_id);
  }
  return {context.article_id, context.start + alignment.token_spans[span.start - 1].start,
          context.start + alignment.token_spans[span.end - 1].end};
}

}  // namespace propaganda
