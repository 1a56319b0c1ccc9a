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
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "propaganda/corpus.h"

namespace propaganda {

// Closed word lists behind the Doubt and Superlative features. Loaded from
// a plain file with `[section]` headers and one word per line.
struct WordLists {
  std::set<std::string> auxiliary;
  std::set<std::string> modal;
  std::set<std::string> question;
  std::set<std::string> superlative_irregular;
  std::set<std::string> superlative_stoplist;

  static const WordLists& defaults();
};

WordLists parse_word_lists(std::istream& in);
WordLists load_word_lists(const std::filesystem::path& path);
void write_word_lists(std::ostream& out, const WordLists& lists);

// (column, value) pairs sorted by column.
using SparseVector = std::vector<std::pair<std::size_t, double>>;

// Smoothed TF-IDF over fragments: idf(t) = ln((1+N)/(1+df(t))) + 1, raw term
// counts for tf, L2-normalized rows. Vocabulary columns follow sorted token
// order.
class TfidfModel {
 public:
  static TfidfModel fit(const std::vector<std::string>& fragments);

  SparseVector transform(std::string_view fragment) const;

  std::size_t vocabulary_size() const { return tokens_.size(); }
  std::size_t document_count() const { return document_count_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<double>& idf() const { return idf_; }
  double idf(std::string_view token) const;
  std::optional<std::size_t> column(std::string_view token) const;

  void save(std::ostream& out) const;
  static TfidfModel load(std::istream& in);

  friend bool operator==(const TfidfModel&, const TfidfModel&) = default;

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, std::size_t, std::less<>> columns_;
  std::vector<double> idf_;
  std::size_t document_count_ = 0;
};

// Case-insensitive, non-overlapping occurrences of the (trimmed) fragment in
// the article text.
std::size_t count_occurrences(std::string_view fragment, std::string_view article_text);

// The fragment occurs more than four times in its article.
bool repetition_feature(std::string_view fragment, std::string_view article_text);
bool superlative_feature(std::string_view fragment,
                         const WordLists& lists = WordLists::defaults());
bool whatabout_feature(std::string_view fragment);
bool doubt_feature(std::string_view fragment,
                   const WordLists& lists = WordLists::defaults());
bool slogan_feature(std::string_view fragment);
// Wrapped in parentheses (inside the fragment or one character outside it)
// or opening with "who ". Offsets index `article_text`.
bool supplement_feature(std::u32string_view article_text, std::size_t start,
                        std::size_t end);
// Mean intensity vector over the fragment's tokens found in the lexicon.
EmotionVector emotion_vector(std::string_view fragment, const EmotionLexicon& lexicon);

struct FeatureVector {
  double length = 0.0;
  SparseVector tfidf;
  bool repetition = false;
  bool superlative = false;
  bool whatabout = false;
  bool doubt = false;
  bool slogan = false;
  bool supplement = false;
  EmotionVector emotion{};

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline constexpr std::size_t kDenseFixedColumns = 7 + kEmotionDims;

// Takes the fragment and its article only; labels never reach here.
FeatureVector build_feature_vector(const Fragment& fragment, const Article& article,
                                   const TfidfModel& tfidf, const EmotionLexicon& lexicon,
                                   const WordLists& lists = WordLists::defaults());

// Dense layout: length, the six booleans as 0/1, emotion, then the TF-IDF
// block (vocabulary_size columns).
std::vector<double> to_dense(const FeatureVector& fv, std::size_t vocabulary_size);
std::vector<std::string> dense_feature_names(const TfidfModel& tfidf,
                                             const EmotionLexicon& lexicon);

// Debug dump: header of named columns then one row per fragment. TF-IDF is
// summarized as its non-zero count to keep rows readable.
void write_feature_dump(std::ostream& out, const std::vector<Fragment>& fragments,
                        const std::vector<FeatureVector>& features,
                        const EmotionLexicon& lexicon);

}  // namespace propaganda
