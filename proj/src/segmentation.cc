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

#include "propaganda/segmentation.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "propaganda/error.h"

namespace propaganda {
namespace {

bool is_terminator(char32_t c) { return c == U'.' || c == U'!' || c == U'?'; }

void push_trimmed(const Article& article, std::size_t start, std::size_t end,
                  std::vector<Sentence>& out) {
  const std::u32string& t = article.text;
  while (start < end && is_space(t[start])) ++start;
  while (end > start && is_space(t[end - 1])) --end;
  if (start < end) {
    out.push_back({article.id, start, end, article.slice(start, end)});
  }
}

std::size_t parse_size(std::string_view s, std::size_t line_no) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("line " + std::to_string(line_no) + ": bad integer '" +
                      std::string(s) + "'");
  }
  return v;
}

std::string context_id_for(const Article& article, ContextStrategy strategy,
                           std::size_t index) {
  return article.id + "-" + std::string(strategy_name(strategy)) + "-" +
         std::to_string(index);
}

// Spans grouped by the sentence that contains them, in sentence order.
std::vector<std::vector<CharRange>> spans_per_sentence(
    const std::vector<SpanAnnotation>& spans,
    const std::vector<Sentence>& sentences) {
  std::vector<std::vector<CharRange>> grouped(sentences.size());
  for (const SpanAnnotation& span : spans) {
    auto it = std::find_if(sentences.begin(), sentences.end(),
                           [&](const Sentence& s) { return s.range().contains(span.range()); });
    if (it == sentences.end()) {
      throw Error("span (" + std::to_string(span.start) + "," +
                  std::to_string(span.end) +
                  ") is not inside a single sentence; split it first");
    }
    grouped[static_cast<std::size_t>(it - sentences.begin())].push_back(span.range());
  }
  for (auto& group : grouped) {
    std::sort(group.begin(), group.end(), [](const CharRange& a, const CharRange& b) {
      return a.start < b.start;
    });
    for (std::size_t i = 1; i < group.size(); ++i) {
      if (group[i].start < group[i - 1].end) {
        throw Error("spans overlap; merge them first");
      }
    }
  }
  return grouped;
}

// Cut position between two spans of one sentence: the gap midpoint snapped
// to the nearest token boundary inside the gap (ties go left).
std::size_t mini_cut(const std::u32string& text, const Sentence& sentence,
                     const CharRange& left, const CharRange& right) {
  std::vector<std::size_t> candidates = {left.end, right.start};
  const auto sentence_view = std::u32string_view(text).substr(
      sentence.start, sentence.end - sentence.start);
  for (const CharRange& tok : tokenize(sentence_view)) {
    for (std::size_t b : {tok.start + sentence.start, tok.end + sentence.start}) {
      if (b >= left.end && b <= right.start) candidates.push_back(b);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  const double mid = (static_cast<double>(left.end) + static_cast<double>(right.start)) / 2.0;
  std::size_t best = candidates.front();
  double best_dist = std::abs(static_cast<double>(best) - mid);
  for (std::size_t c : candidates) {
    const double d = std::abs(static_cast<double>(c) - mid);
    if (d < best_dist) {
      best = c;
      best_dist = d;
    }
  }
  return best;
}

}  // namespace

std::string_view strategy_name(ContextStrategy s) {
  return s == ContextStrategy::kMini ? "mini" : "sentential";
}

ContextStrategy parse_strategy(std::string_view name) {
  if (name == "mini") return ContextStrategy::kMini;
  if (name == "sentential") return ContextStrategy::kSentential;
  throw FormatError("unknown context strategy '" + std::string(name) +
                    "' (expected mini or sentential)");
}

std::vector<Sentence> split_sentences(const Article& article) {
  std::vector<Sentence> sentences;
  const std::u32string& t = article.text;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == U'\n') {
      push_trimmed(article, begin, i, sentences);
      begin = i + 1;
      continue;
    }
    if (!is_terminator(t[i]) || i + 1 >= t.size() || !is_space(t[i + 1]) ||
        t[i + 1] == U'\n') {
      continue;
    }
    std::size_t j = i + 1;
    while (j < t.size() && is_space(t[j]) && t[j] != U'\n') ++j;
    if (j < t.size() && is_upper(t[j])) {
      push_trimmed(article, begin, i + 1, sentences);
      begin = i + 1;
    }
  }
  push_trimmed(article, begin, t.size(), sentences);
  return sentences;
}

std::vector<SpanAnnotation> merge_overlapping(std::vector<SpanAnnotation> spans) {
  if (spans.empty()) return spans;
  for (const SpanAnnotation& s : spans) {
    if (s.article_id != spans.front().article_id) {
      throw Error("merge_overlapping: spans from articles " +
                  spans.front().article_id + " and " + s.article_id);
    }
  }
  std::sort(spans.begin(), spans.end(), [](const SpanAnnotation& a, const SpanAnnotation& b) {
    return a.start != b.start ? a.start < b.start : a.end < b.end;
  });
  std::vector<SpanAnnotation> merged;
  for (SpanAnnotation& s : spans) {
    if (!merged.empty() && s.start < merged.back().end) {
      merged.back().end = std::max(merged.back().end, s.end);
    } else {
      merged.push_back(std::move(s));
    }
  }
  return merged;
}

std::vector<SpanAnnotation> split_at_sentence_boundaries(
    const SpanAnnotation& span, const std::vector<Sentence>& sentences) {
  std::vector<SpanAnnotation> pieces;
  for (const Sentence& s : sentences) {
    const std::size_t lo = std::max(span.start, s.start);
    const std::size_t hi = std::min(span.end, s.end);
    if (lo < hi) pieces.push_back({span.article_id, lo, hi});
  }
  if (pieces.empty()) {
    throw Error("span (" + std::to_string(span.start) + "," +
                std::to_string(span.end) + ") of article " + span.article_id +
                " lies outside every sentence");
  }
  return pieces;
}

std::vector<Context> build_mini_contexts(const Article& article,
                                         const std::vector<SpanAnnotation>& spans,
                                         const std::vector<Sentence>& sentences) {
  const auto grouped = spans_per_sentence(spans, sentences);
  std::vector<Context> contexts;
  for (std::size_t si = 0; si < sentences.size(); ++si) {
    const Sentence& sentence = sentences[si];
    const auto& group = grouped[si];
    if (group.size() <= 1) {
      Context c;
      c.context_id = context_id_for(article, ContextStrategy::kMini, contexts.size());
      c.article_id = article.id;
      c.start = sentence.start;
      c.end = sentence.end;
      c.strategy = ContextStrategy::kMini;
      if (!group.empty()) {
        c.gold_span = CharRange{group[0].start - c.start, group[0].end - c.start};
      }
      contexts.push_back(std::move(c));
      continue;
    }
    std::size_t left = sentence.start;
    for (std::size_t k = 0; k < group.size(); ++k) {
      const std::size_t right = k + 1 < group.size()
                                    ? mini_cut(article.text, sentence, group[k], group[k + 1])
                                    : sentence.end;
      Context c;
      c.context_id = context_id_for(article, ContextStrategy::kMini, contexts.size());
      c.article_id = article.id;
      c.start = left;
      c.end = right;
      c.strategy = ContextStrategy::kMini;
      c.gold_span = CharRange{group[k].start - left, group[k].end - left};
      contexts.push_back(std::move(c));
      left = right;
    }
  }
  return contexts;
}

std::vector<Context> build_sentential_contexts(
    const Article& article, const std::vector<SpanAnnotation>& spans,
    const std::vector<Sentence>& sentences) {
  const auto grouped = spans_per_sentence(spans, sentences);
  std::vector<Context> contexts;
  for (std::size_t si = 0; si < sentences.size(); ++si) {
    Context c;
    c.context_id = context_id_for(article, ContextStrategy::kSentential, contexts.size());
    c.article_id = article.id;
    c.start = sentences[si].start;
    c.end = sentences[si].end;
    c.strategy = ContextStrategy::kSentential;
    const CharRange* longest = nullptr;
    for (const CharRange& r : grouped[si]) {
      // Groups are sorted by start, so strict '>' keeps the earliest on ties.
      if (longest == nullptr || r.size() > longest->size()) longest = &r;
    }
    if (longest != nullptr) {
      c.gold_span = CharRange{longest->start - c.start, longest->end - c.start};
    }
    contexts.push_back(std::move(c));
  }
  return contexts;
}

std::vector<Context> segment_article(const Article& article,
                                     const std::vector<SpanAnnotation>& spans,
                                     ContextStrategy strategy,
                                     SegmentStats* stats) {
  const auto sentences = split_sentences(article);
  std::vector<SpanAnnotation> own;
  for (const SpanAnnotation& s : spans) {
    if (s.article_id == article.id) own.push_back(s);
  }
  SegmentStats local;
  std::vector<SpanAnnotation> pieces;
  for (const SpanAnnotation& merged : merge_overlapping(std::move(own))) {
    try {
      auto split = split_at_sentence_boundaries(merged, sentences);
      pieces.insert(pieces.end(), split.begin(), split.end());
    } catch (const Error&) {
      ++local.outside_text;
    }
  }
  local.gold_pieces = pieces.size();
  auto contexts = strategy == ContextStrategy::kMini
                      ? build_mini_contexts(article, pieces, sentences)
                      : build_sentential_contexts(article, pieces, sentences);
  for (const Context& c : contexts) {
    if (c.gold_span) ++local.retained;
  }
  if (stats != nullptr) {
    stats->gold_pieces += local.gold_pieces;
    stats->retained += local.retained;
    stats->outside_text += local.outside_text;
  }
  return contexts;
}

TokenAlignment tokenize_and_align(const Context& context, const Article& article) {
  if (context.end > article.text.size() || context.start >= context.end) {
    throw Error("context " + context.context_id + " is empty or outside its article");
  }
  const auto view = std::u32string_view(article.text)
                        .substr(context.start, context.end - context.start);
  return {context.context_id, tokenize(view)};
}

TokenSpan char_span_to_token_span(const TokenAlignment& alignment,
                                  std::size_t char_start, std::size_t char_end) {
  std::optional<std::size_t> first;
  std::size_t last = 0;
  for (std::size_t i = 0; i < alignment.token_spans.size(); ++i) {
    const CharRange& tok = alignment.token_spans[i];
    if (tok.start < char_end && tok.end > char_start) {
      if (!first) first = i + 1;
      last = i + 1;
    }
  }
  if (!first) {
    throw Error("char range (" + std::to_string(char_start) + "," +
                std::to_string(char_end) + ") of context " +
                alignment.context_id + " covers no token");
  }
  return {*first, last};
}

void write_contexts(std::ostream& out, const std::vector<Context>& contexts) {
  for (const Context& c : contexts) {
    out << c.context_id << '\t' << c.article_id << '\t' << c.start << '\t'
        << c.end << '\t' << strategy_name(c.strategy) << '\t';
    if (c.gold_span) out << c.gold_span->start << '\t' << c.gold_span->end;
    else out << '\t';
    out << '\n';
  }
}

std::vector<Context> parse_contexts(std::istream& in) {
  std::vector<Context> contexts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 7) {
      throw FormatError("contexts line " + std::to_string(line_no) +
                        ": expected 7 tab-separated fields");
    }
    Context c;
    c.context_id = std::string(f[0]);
    c.article_id = std::string(f[1]);
    c.start = parse_size(f[2], line_no);
    c.end = parse_size(f[3], line_no);
    c.strategy = parse_strategy(f[4]);
    if (c.start >= c.end) {
      throw FormatError("contexts line " + std::to_string(line_no) + ": empty context");
    }
    if (!f[5].empty() || !f[6].empty()) {
      CharRange gold{parse_size(f[5], line_no), parse_size(f[6], line_no)};
      if (gold.empty() || gold.end > c.end - c.start) {
        throw FormatError("contexts line " + std::to_string(line_no) +
                          ": gold span outside context");
      }
      c.gold_span = gold;
    }
    contexts.push_back(std::move(c));
  }
  return contexts;
}

std::vector<Context> load_contexts(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return parse_contexts(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_alignments(std::ostream& out, const std::vector<TokenAlignment>& alignments) {
  for (const TokenAlignment& a : alignments) {
    for (std::size_t i = 0; i < a.token_spans.size(); ++i) {
      out << a.context_id << '\t' << i + 1 << '\t' << a.token_spans[i].start
          << '\t' << a.token_spans[i].end << '\n';
    }
  }
}

std::map<std::string, TokenAlignment> parse_alignments(std::istream& in) {
  std::map<std::string, TokenAlignment> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 4) {
      throw FormatError("alignment line " + std::to_string(line_no) +
                        ": expected 4 tab-separated fields");
    }
    TokenAlignment& a = out[std::string(f[0])];
    a.context_id = std::string(f[0]);
    const std::size_t idx = parse_size(f[1], line_no);
    if (idx != a.token_spans.size() + 1) {
      throw FormatError("alignment line " + std::to_string(line_no) +
                        ": token indices must run 1,2,3,... per context");
    }
    CharRange r{parse_size(f[2], line_no), parse_size(f[3], line_no)};
    if (r.empty() || (!a.token_spans.empty() && r.start < a.token_spans.back().end)) {
      throw FormatError("alignment line " + std::to_string(line_no) +
                        ": token spans must be non-empty, ordered and disjoint");
    }
    a.token_spans.push_back(r);
  }
  return out;
}

std::map<std::string, TokenAlignment> load_alignments(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return parse_alignments(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace propaganda
