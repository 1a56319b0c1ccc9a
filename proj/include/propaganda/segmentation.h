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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "propaganda/corpus.h"
#include "propaganda/text.h"

namespace propaganda {

struct Sentence {
  std::string article_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;

  CharRange range() const { return {start, end}; }
};

enum class ContextStrategy { kMini, kSentential };

std::string_view strategy_name(ContextStrategy s);
ContextStrategy parse_strategy(std::string_view name);

// A training/inference unit holding at most one gold span. `gold_span` is
// relative to `start`.
struct Context {
  std::string context_id;
  std::string article_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::optional<CharRange> gold_span;
  ContextStrategy strategy = ContextStrategy::kSentential;

  CharRange range() const { return {start, end}; }
  friend bool operator==(const Context&, const Context&) = default;
};

// Token char spans relative to the context start. Token i (1-based) lines
// up with embedding row i.
struct TokenAlignment {
  std::string context_id;
  std::vector<CharRange> token_spans;
};

// Inclusive 1-based token indices; 0 is reserved for "no boundary".
struct TokenSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

// Newlines are hard boundaries. Within a line a sentence ends after '.',
// '!' or '?' when followed by whitespace and then an uppercase letter.
// Sentences are trimmed of surrounding whitespace; empty ones are dropped.
std::vector<Sentence> split_sentences(const Article& article);

// Unions chains of overlapping spans; output sorted by start. Throws Error
// if the spans come from more than one article.
std::vector<SpanAnnotation> merge_overlapping(std::vector<SpanAnnotation> spans);

// Intersections of `span` with each sentence it touches. Throws Error when
// the span touches no sentence.
std::vector<SpanAnnotation> split_at_sentence_boundaries(
    const SpanAnnotation& span, const std::vector<Sentence>& sentences);

// `spans` must be merged, sentence-split and pairwise disjoint.
std::vector<Context> build_mini_contexts(const Article& article,
                                         const std::vector<SpanAnnotation>& spans,
                                         const std::vector<Sentence>& sentences);
std::vector<Context> build_sentential_contexts(
    const Article& article, const std::vector<SpanAnnotation>& spans,
    const std::vector<Sentence>& sentences);

struct SegmentStats {
  std::size_t gold_pieces = 0;    // merged, sentence-split gold spans
  std::size_t retained = 0;       // pieces that became a context's gold span
  std::size_t outside_text = 0;   // spans covering only inter-sentence space
};

// Full per-article pipeline: merge, split at sentence boundaries, build
// contexts with the given strategy. `spans` may be empty (inference).
std::vector<Context> segment_article(const Article& article,
                                     const std::vector<SpanAnnotation>& spans,
                                     ContextStrategy strategy,
                                     SegmentStats* stats = nullptr);

TokenAlignment tokenize_and_align(const Context& context, const Article& article);

// Outward snapping: I_s is the first and I_e the last token overlapping
// [char_start, char_end). Throws Error when no token overlaps.
TokenSpan char_span_to_token_span(const TokenAlignment& alignment,
                                  std::size_t char_start, std::size_t char_end);

// Contexts file: TSV `context_id article_id start end strategy gold_start
// gold_end`, gold offsets relative to the context and empty when absent.
void write_contexts(std::ostream& out, const std::vector<Context>& contexts);
std::vector<Context> parse_contexts(std::istream& in);
std::vector<Context> load_contexts(const std::filesystem::path& path);

// Alignment sidecar: TSV `context_id token_idx char_start char_end` with
// 1-based token_idx.
void write_alignments(std::ostream& out, const std::vector<TokenAlignment>& alignments);
std::map<std::string, TokenAlignment> load_alignments(const std::filesystem::path& path);
std::map<std::string, TokenAlignment> parse_alignments(std::istream& in);

}  // namespace propaganda
