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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "propaganda/technique.h"
#include "propaganda/text.h"

namespace propaganda {

// A news article. `text` is indexed by Unicode scalar value; CRLF line
// endings have already been folded to LF.
struct Article {
  std::string id;
  std::u32string text;

  std::string utf8() const { return encode_utf8(text); }
  std::string slice(std::size_t start, std::size_t end) const {
    return encode_utf8(std::u32string_view(text).substr(start, end - start));
  }
};

// Validates id and text and normalizes line endings.
Article make_article(std::string id, std::string_view utf8_text);

using ArticleIndex = std::map<std::string, Article>;
ArticleIndex index_articles(const std::vector<Article>& articles);
const Article& find_article(const ArticleIndex& index, const std::string& id);

struct SpanAnnotation {
  std::string article_id;
  std::size_t start = 0;
  std::size_t end = 0;

  CharRange range() const { return {start, end}; }
  friend bool operator==(const SpanAnnotation&, const SpanAnnotation&) = default;
};

// A fragment of an article to classify.
struct Fragment {
  std::string article_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;  // UTF-8 slice of the article text [start, end)

  // Stable key used in embedding files and POS sidecars.
  std::string id() const;
};

struct TechniqueLabeledFragment {
  Fragment fragment;
  Technique technique = Technique::kLoadedLanguage;
};

// Reads every `article{id}.txt` below `dir` (symlinked directories are
// followed). Returns articles sorted by id.
std::vector<Article> load_articles(const std::filesystem::path& dir);

// SI labels: `article_id<TAB>start<TAB>end`, blank lines skipped. When
// `articles` is given every span is bounds-checked against its article.
std::vector<SpanAnnotation> load_si_labels(const std::filesystem::path& path,
                                           const ArticleIndex* articles = nullptr);
std::vector<SpanAnnotation> parse_si_labels(std::istream& in,
                                            const ArticleIndex* articles = nullptr);
void write_si_labels(std::ostream& out, const std::vector<SpanAnnotation>& spans);

// TC labels: `article_id<TAB>technique<TAB>start<TAB>end`.
std::vector<TechniqueLabeledFragment> load_tc_labels(const std::filesystem::path& path,
                                                     const ArticleIndex& articles);
std::vector<TechniqueLabeledFragment> parse_tc_labels(std::istream& in,
                                                      const ArticleIndex& articles);
void write_tc_labels(std::ostream& out,
                     const std::vector<TechniqueLabeledFragment>& fragments);

// Fragments to classify, from a TC-format file whose technique column may
// hold anything (e.g. `?`), or from a 3-column `article_id start end` file.
std::vector<Fragment> load_fragments(const std::filesystem::path& path,
                                     const ArticleIndex& articles);

inline constexpr std::size_t kEmotionDims = 10;
using EmotionVector = std::array<double, kEmotionDims>;

// Default affect dimension names, in slot order.
const std::array<std::string, kEmotionDims>& default_emotion_dimensions();

class EmotionLexicon {
 public:
  EmotionLexicon();
  explicit EmotionLexicon(std::array<std::string, kEmotionDims> dimensions);

  const std::array<std::string, kEmotionDims>& dimensions() const { return dimensions_; }
  std::size_t size() const { return entries_.size(); }

  // Zero vector for unknown words. Lookup is on the lowercased word.
  EmotionVector lookup(std::string_view word) const;
  bool contains(std::string_view word) const;

  // Throws FormatError for scores outside [0,1] or unknown dimensions.
  void add(std::string_view word, std::string_view dimension, double score);

  // Words in sorted order.
  std::vector<std::string> words() const;

 private:
  std::array<std::string, kEmotionDims> dimensions_;
  std::unordered_map<std::string, EmotionVector> entries_;
};

// `word<TAB>score<TAB>dimension` lines. A first line whose score column is
// not numeric is taken as a header and skipped.
EmotionLexicon load_emotion_lexicon(const std::filesystem::path& path);
EmotionLexicon parse_emotion_lexicon(std::istream& in);
// Writes the lexicon back in the same TSV format, sorted by word.
void write_emotion_lexicon(std::ostream& out, const EmotionLexicon& lexicon);

std::string read_file(const std::filesystem::path& path);

}  // namespace propaganda
