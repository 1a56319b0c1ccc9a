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

#include "propaganda/eval.h"

#include <algorithm>
#include <cstdio>
#include <json.hpp>
#include <tuple>

#include "propaganda/error.h"

namespace propaganda {
namespace {

std::size_t overlap(const SpanAnnotation& a, const SpanAnnotation& b) {
  const std::size_t lo = std::max(a.start, b.start);
  const std::size_t hi = std::min(a.end, b.end);
  return hi > lo ? hi - lo : 0;
}

// Sum over `from` of the best normalized overlap with any span in `to`.
double best_overlap_sum(const std::vector<const SpanAnnotation*>& from,
                        const std::vector<const SpanAnnotation*>& to) {
  double sum = 0.0;
  for (const SpanAnnotation* s : from) {
    double best = 0.0;
    for (const SpanAnnotation* t : to) {
      best = std::max(best, static_cast<double>(overlap(*s, *t)) /
                                static_cast<double>(s->end - s->start));
    }
    sum += best;
  }
  return sum;
}

PrfScore prf(double p_sum, std::size_t n_pred, double r_sum, std::size_t n_gold) {
  PrfScore s;
  if (n_pred == 0 && n_gold == 0) {
    s.precision = 1.0;
    s.recall = 1.0;
  } else {
    s.precision = n_pred == 0 ? 0.0 : p_sum / static_cast<double>(n_pred);
    s.recall = n_gold == 0 ? 0.0 : r_sum / static_cast<double>(n_gold);
  }
  s.f1 = f1_of(s.precision, s.recall);
  return s;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

}  // namespace

double f1_of(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

SpanScore score_si(const std::vector<SpanAnnotation>& gold,
                   const std::vector<SpanAnnotation>& pred) {
  std::map<std::string, std::pair<std::vector<const SpanAnnotation*>,
                                  std::vector<const SpanAnnotation*>>> groups;
  for (const SpanAnnotation& g : gold) {
    if (g.start >= g.end) throw Error("gold span with start >= end");
    groups[g.article_id].first.push_back(&g);
  }
  for (const SpanAnnotation& p : pred) {
    if (p.start >= p.end) throw Error("predicted span with start >= end");
    groups[p.article_id].second.push_back(&p);
  }
  SpanScore score;
  score.num_gold = gold.size();
  score.num_pred = pred.size();
  double p_sum = 0.0;
  double r_sum = 0.0;
  for (auto& [id, g] : groups) {
    auto& [golds, preds] = g;
    std::vector<const SpanAnnotation*> sorted = preds;
    std::sort(sorted.begin(), sorted.end(),
              [](const SpanAnnotation* a, const SpanAnnotation* b) { return a->start < b->start; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i]->start < sorted[i - 1]->end) {
        throw Error("overlapping predicted spans in article " + id + "; merge them first");
      }
    }
    const double ap = best_overlap_sum(preds, golds);
    const double ar = best_overlap_sum(golds, preds);
    p_sum += ap;
    r_sum += ar;
    score.per_article[id] = prf(ap, preds.size(), ar, golds.size());
  }
  const PrfScore total = prf(p_sum, pred.size(), r_sum, gold.size());
  score.precision = total.precision;
  score.recall = total.recall;
  score.f1 = total.f1;
  return score;
}

TcScore score_tc(const std::vector<Technique>& gold, const std::vector<Technique>& pred) {
  if (gold.size() != pred.size()) {
    throw Error("score_tc: " + std::to_string(gold.size()) + " gold labels but " +
                std::to_string(pred.size()) + " predictions");
  }
  std::array<std::size_t, kNumTechniques> tp{}, fp{}, fn{};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const std::size_t g = index_of(gold[i]);
    const std::size_t p = index_of(pred[i]);
    if (g == p) {
      ++tp[g];
    } else {
      ++fp[p];
      ++fn[g];
    }
  }
  TcScore score;
  score.num_fragments = gold.size();
  std::size_t TP = 0, FP = 0, FN = 0;
  for (std::size_t c = 0; c < kNumTechniques; ++c) {
    TP += tp[c];
    FP += fp[c];
    FN += fn[c];
    score.support[c] = tp[c] + fn[c];
    const std::size_t denom = 2 * tp[c] + fp[c] + fn[c];
    score.per_class_f1[c] = denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp[c]) /
                                                   static_cast<double>(denom);
  }
  score.micro_precision = TP + FP == 0 ? 0.0 : static_cast<double>(TP) / static_cast<double>(TP + FP);
  score.micro_recall = TP + FN == 0 ? 0.0 : static_cast<double>(TP) / static_cast<double>(TP + FN);
  score.micro_f1 = f1_of(score.micro_precision, score.micro_recall);
  return score;
}

TcScore score_tc(const std::vector<TechniqueLabeledFragment>& gold,
                 const std::vector<TechniqueLabeledFragment>& pred) {
  using Key = std::tuple<std::string, std::size_t, std::size_t>;
  std::map<Key, Technique> predicted;
  for (const auto& p : pred) {
    const Key key{p.fragment.article_id, p.fragment.start, p.fragment.end};
    if (!predicted.emplace(key, p.technique).second) {
      throw Error("duplicate prediction for fragment " + p.fragment.id());
    }
  }
  std::vector<Technique> g;
  std::vector<Technique> p;
  for (const auto& f : gold) {
    auto it = predicted.find(Key{f.fragment.article_id, f.fragment.start, f.fragment.end});
    if (it == predicted.end()) throw Error("no prediction for fragment " + f.fragment.id());
    g.push_back(f.technique);
    p.push_back(it->second);
  }
  return score_tc(g, p);
}

std::string format_si_report(const SpanScore& s) {
  std::string out;
  out += "SI partial-match evaluation\n";
  out += "gold spans:      " + std::to_string(s.num_gold) + "\n";
  out += "predicted spans: " + std::to_string(s.num_pred) + "\n";
  out += fmt("precision: %.6f\n", s.precision);
  out += fmt("recall:    %.6f\n", s.recall);
  out += fmt("F1:        %.6f\n", s.f1);
  return out;
}

std::string format_tc_report(const TcScore& s) {
  std::string out;
  out += "TC evaluation (" + std::to_string(s.num_fragments) + " fragments)\n";
  out += fmt("micro-F1: %.6f\n", s.micro_f1);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-36s %8s %8s\n", "technique", "support", "F1");
  out += buf;
  for (std::size_t c = 0; c < kNumTechniques; ++c) {
    std::snprintf(buf, sizeof(buf), "%-36s %8zu %8.4f\n",
                  std::string(kTechniqueLabels[c]).c_str(), s.support[c], s.per_class_f1[c]);
    out += buf;
  }
  return out;
}

std::string format_si_jsonl(const SpanScore& s) {
  std::string out;
  nlohmann::ordered_json summary = {{"type", "summary"},       {"precision", s.precision},
                                    {"recall", s.recall},      {"f1", s.f1},
                                    {"num_gold", s.num_gold},  {"num_pred", s.num_pred}};
  out += summary.dump() + "\n";
  for (const auto& [id, a] : s.per_article) {
    nlohmann::ordered_json line = {{"type", "article"}, {"article_id", id},
                                   {"precision", a.precision}, {"recall", a.recall},
                                   {"f1", a.f1}};
    out += line.dump() + "\n";
  }
  return out;
}

std::string format_tc_jsonl(const TcScore& s) {
  std::string out;
  nlohmann::ordered_json summary = {{"type", "summary"},
                                    {"micro_f1", s.micro_f1},
                                    {"micro_precision", s.micro_precision},
                                    {"micro_recall", s.micro_recall},
                                    {"num_fragments", s.num_fragments}};
  out += summary.dump() + "\n";
  for (std::size_t c = 0; c < kNumTechniques; ++c) {
    nlohmann::ordered_json line = {{"type", "technique"},
                                   {"technique", std::string(kTechniqueLabels[c])},
                                   {"support", s.support[c]},
                                   {"f1", s.per_class_f1[c]}};
    out += line.dump() + "\n";
  }
  return out;
}

}  // namespace propaganda
