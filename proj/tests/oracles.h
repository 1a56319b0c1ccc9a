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

// Reference implementations used only by tests. Deliberately naive.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// Central differences, one coordinate at a time.
inline std::vector<double> numeric_gradient(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
    double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

// max_i |a_i - b_i| / max(1, |a_i|, |b_i|)
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({1.0, std::abs(a[i]), std::abs(b[i])});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

// Interval union by painting a boolean array. Strictly overlapping
// intervals join; touching ones stay apart (the painted cells are
// contiguous, so touching is tracked through an explicit link array).
inline std::vector<std::pair<std::size_t, std::size_t>> interval_union(
    const std::vector<std::pair<std::size_t, std::size_t>>& in) {
  std::size_t hi = 0;
  for (auto [s, e] : in) hi = std::max(hi, e);
  std::vector<int> cover(hi + 1, 0);
  std::vector<bool> link(hi + 1, false);  // link[i]: cells i-1 and i share an interval
  for (auto [s, e] : in) {
    for (std::size_t i = s; i < e; ++i) cover[i] = 1;
    for (std::size_t i = s + 1; i < e; ++i) link[i] = true;
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0;
  while (i < hi) {
    if (!cover[i]) { ++i; continue; }
    std::size_t j = i + 1;
    while (j < hi && cover[j] && link[j]) ++j;
    out.push_back({i, j});
    i = j;
  }
  return out;
}

// Per-character partial-match scorer over (article, start, end) triples.
struct Span {
  std::string article;
  std::size_t start, end;
};

inline double overlap_chars(const Span& a, const Span& b) {
  if (a.article != b.article) return 0.0;
  double n = 0;
  for (std::size_t c = a.start; c < a.end; ++c) {
    if (c >= b.start && c < b.end) n += 1;
  }
  return n;
}

inline std::pair<double, double> partial_match(const std::vector<Span>& gold,
                                               const std::vector<Span>& pred) {
  if (gold.empty() && pred.empty()) return {1.0, 1.0};
  double p = 0, r = 0;
  for (const Span& s : pred) {
    double best = 0;
    for (const Span& t : gold) best = std::max(best, overlap_chars(s, t) / double(s.end - s.start));
    p += best;
  }
  for (const Span& t : gold) {
    double best = 0;
    for (const Span& s : pred) best = std::max(best, overlap_chars(s, t) / double(t.end - t.start));
    r += best;
  }
  return {pred.empty() ? 0.0 : p / pred.size(), gold.empty() ? 0.0 : r / gold.size()};
}

// Confusion matrix per-class F1 and micro-F1.
struct ConfusionResult {
  std::vector<double> per_class_f1;
  double micro_f1;
};

inline ConfusionResult confusion_f1(const std::vector<int>& gold, const std::vector<int>& pred,
                                    int classes) {
  std::vector<std::vector<int>> m(classes, std::vector<int>(classes, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) m[gold[i]][pred[i]]++;
  ConfusionResult out;
  int tp_all = 0, fp_all = 0, fn_all = 0;
  for (int c = 0; c < classes; ++c) {
    int tp = m[c][c], fp = 0, fn = 0;
    for (int k = 0; k < classes; ++k) {
      if (k == c) continue;
      fp += m[k][c];
      fn += m[c][k];
    }
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
    const double denom = 2.0 * tp + fp + fn;
    out.per_class_f1.push_back(denom == 0 ? 0.0 : 2.0 * tp / denom);
  }
  const double d = 2.0 * tp_all + fp_all + fn_all;
  out.micro_f1 = d == 0 ? 0.0 : 2.0 * tp_all / d;
  return out;
}


}  // namespace oracle
