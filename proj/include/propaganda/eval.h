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
#include <map>
#include <string>
#include <vector>

#include "propaganda/corpus.h"
#include "propaganda/technique.h"

namespace propaganda {

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Harmonic mean, 0 when precision + recall is 0.
double f1_of(double precision, double recall);

struct SpanScore : PrfScore {
  std::size_t num_gold = 0;
  std::size_t num_pred = 0;
  std::map<std::string, PrfScore> per_article;
};

// Partial-match scoring with C(s, t, h) = |s & t| / h:
//   P = (1/|S|) sum_{s in S} max_{t in T} C(s, t, |s|)
//   R = (1/|T|) sum_{t in T} max_{s in S} C(s, t, |t|)
// where S are predictions, T gold spans, and only same-article pairs
// overlap. Both sets empty gives P = R = 1; an empty side otherwise gives 0.
// Throws Error if predictions overlap within an article.
SpanScore score_si(const std::vector<SpanAnnotation>& gold,
                   const std::vector<SpanAnnotation>& pred);

struct TcScore {
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
  std::array<double, kNumTechniques> per_class_f1{};
  std::array<std::size_t, kNumTechniques> support{};
  std::size_t num_fragments = 0;
};

// Gold and prediction lists are aligned fragment by fragment.
TcScore score_tc(const std::vector<Technique>& gold, const std::vector<Technique>& pred);

// Matches predictions to gold fragments by (article, start, end). Every
// gold fragment needs exactly one prediction.
TcScore score_tc(const std::vector<TechniqueLabeledFragment>& gold,
                 const std::vector<TechniqueLabeledFragment>& pred);

std::string format_si_report(const SpanScore& score);
std::string format_tc_report(const TcScore& score);
// One JSON object per line: a summary line, then per-article/per-class lines.
std::string format_si_jsonl(const SpanScore& score);
std::string format_tc_jsonl(const TcScore& score);

}  // namespace propaganda
