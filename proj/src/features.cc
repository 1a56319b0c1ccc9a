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

#include "propaganda/features.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "propaganda/error.h"

namespace propaganda {
namespace {

std::string_view trim_space(std::string_view s) {
  // UTF-8 safe: only ASCII whitespace bytes are removed.
  return trim(s);
}

bool starts_with_phrase(std::string_view lowered, std::string_view phrase) {
  if (!lowered.starts_with(phrase)) return false;
  if (lowered.size() == phrase.size()) return true;
  const char next = lowered[phrase.size()];
  return !((next >= 'a' && next <= 'z') || (next >= '0' && next <= '9'));
}

}  // namespace

const WordLists& WordLists::defaults() {
  static const WordLists kDefaults = [] {
    WordLists w;
    w.auxiliary = {"am",   "are", "be",  "been", "being", "did",  "do",
                   "does", "had", "has", "have", "is",    "was", "were"};
    w.modal = {"can",   "could", "may",    "might", "must",
               "shall", "should", "will", "would"};
    w.question = {"how",  "what",  "when", "where", "which",
                  "who",  "whom",  "whose", "why"};
    w.superlative_irregular = {"best", "least", "most", "worst"};
    w.superlative_stoplist = {
        "arrest",   "attest",  "behest",  "conquest", "contest",  "detest",
        "digest",   "earnest", "forest",  "harvest",  "honest",   "inquest",
        "interest", "invest",  "manifest", "midwest", "modest",   "northwest",
        "protest",  "request", "southwest", "suggest", "unrest",  "west"};
    return w;
  }();
  return kDefaults;
}

WordLists parse_word_lists(std::istream& in) {
  WordLists lists;
  std::set<std::string>* current = nullptr;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      const std::string_view name = t.substr(1, t.size() - 2);
      if (name == "auxiliary") current = &lists.auxiliary;
      else if (name == "modal") current = &lists.modal;
      else if (name == "question") current = &lists.question;
      else if (name == "superlative_irregular") current = &lists.superlative_irregular;
      else if (name == "superlative_stoplist") current = &lists.superlative_stoplist;
      else {
        throw FormatError("word lists line " + std::to_string(line_no) +
                          ": unknown section '" + std::string(name) + "'");
      }
      continue;
    }
    if (current == nullptr) {
      throw FormatError("word lists line " + std::to_string(line_no) +
                        ": word before any [section] header");
    }
    current->insert(to_lower(t));
  }
  return lists;
}

WordLists load_word_lists(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_word_lists(in);
}

void write_word_lists(std::ostream& out, const WordLists& lists) {
  const std::pair<const char*, const std::set<std::string>*> sections[] = {
      {"auxiliary", &lists.auxiliary},
      {"modal", &lists.modal},
      {"question", &lists.question},
      {"superlative_irregular", &lists.superlative_irregular},
      {"superlative_stoplist", &lists.superlative_stoplist},
  };
  bool first = true;
  for (const auto& [name, words] : sections) {
    if (!first) out << '\n';
    first = false;
    out << '[' << name << "]\n";
    for (const std::string& w : *words) out << w << '\n';
  }
}

TfidfModel TfidfModel::fit(const std::vector<std::string>& fragments) {
  if (fragments.empty()) throw Error("fit_tfidf: no fragments");
  std::map<std::string, std::size_t, std::less<>> df;
  bool any_token = false;
  for (const std::string& f : fragments) {
    auto words = word_tokens(f);
    any_token = any_token || !words.empty();
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    for (std::string& w : words) ++df[std::move(w)];
  }
  if (!any_token) throw Error("fit_tfidf: every fragment is empty");

  TfidfModel model;
  model.document_count_ = fragments.size();
  const double n = static_cast<double>(fragments.size());
  for (const auto& [token, count] : df) {
    model.columns_.emplace(token, model.tokens_.size());
    model.tokens_.push_back(token);
    model.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return model;
}

std::optional<std::size_t> TfidfModel::column(std::string_view token) const {
  auto it = columns_.find(token);
  if (it == columns_.end()) return std::nullopt;
  return it->second;
}

double TfidfModel::idf(std::string_view token) const {
  auto col = column(token);
  return col ? idf_[*col] : 0.0;
}

SparseVector TfidfModel::transform(std::string_view fragment) const {
  std::map<std::size_t, double> counts;
  for (const std::string& w : word_tokens(fragment)) {
    if (auto col = column(w)) counts[*col] += 1.0;
  }
  SparseVector out;
  double norm2 = 0.0;
  for (const auto& [col, tf] : counts) {
    const double v = tf * idf_[col];
    out.emplace_back(col, v);
    norm2 += v * v;
  }
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& [col, v] : out) v *= inv;
  }
  return out;
}

void TfidfModel::save(std::ostream& out) const {
  out << "PDTFIDF1 " << document_count_ << ' ' << tokens_.size() << '\n';
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out << tokens_[i] << '\t' << format_double(idf_[i]) << '\n';
  }
}

TfidfModel TfidfModel::load(std::istream& in) {
  std::string magic;
  std::size_t docs = 0;
  std::size_t size = 0;
  if (!(in >> magic >> docs >> size) || magic != "PDTFIDF1") {
    throw FormatError("bad TF-IDF model header");
  }
  std::string line;
  std::getline(in, line);
  TfidfModel model;
  model.document_count_ = docs;
  for (std::size_t i = 0; i < size; ++i) {
    if (!std::getline(in, line)) throw FormatError("truncated TF-IDF model");
    const auto f = split(line, '\t');
    if (f.size() != 2) throw FormatError("bad TF-IDF model row: " + line);
    double idf = 0.0;
    auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), idf);
    if (ec != std::errc() || !std::isfinite(idf)) {
      throw FormatError("bad idf value: " + std::string(f[1]));
    }
    model.columns_.emplace(std::string(f[0]), i);
    model.tokens_.emplace_back(f[0]);
    model.idf_.push_back(idf);
  }
  return model;
}

std::size_t count_occurrences(std::string_view fragment, std::string_view article_text) {
  const std::string needle = to_lower(trim_space(fragment));
  if (needle.empty()) return 0;
  const std::string hay = to_lower(article_text);
  std::size_t count = 0;
  std::size_t pos = hay.find(needle);
  while (pos != std::string::npos) {
    ++count;
    pos = hay.find(needle, pos + needle.size());
  }
  return count;
}

bool repetition_feature(std::string_view fragment, std::string_view article_text) {
  return count_occurrences(fragment, article_text) > 4;
}

bool superlative_feature(std::string_view fragment, const WordLists& lists) {
  for (const std::string& w : word_tokens(fragment)) {
    if (lists.superlative_irregular.count(w) > 0) return true;
    if (w.size() >= 6 && w.ends_with("est") && lists.superlative_stoplist.count(w) == 0) {
      return true;
    }
  }
  return false;
}

bool whatabout_feature(std::string_view fragment) {
  const std::u32string text = decode_utf8(fragment);
  std::size_t i = 0;
  while (i < text.size() && (is_space(text[i]) || is_punct(text[i]))) ++i;
  const std::string rest = to_lower(encode_utf8(std::u32string_view(text).substr(i)));
  return starts_with_phrase(rest, "what about");
}

bool doubt_feature(std::string_view fragment, const WordLists& lists) {
  const auto words = word_tokens(fragment);
  if (words.empty()) return false;
  const std::string& first = words.front();
  return lists.auxiliary.count(first) > 0 || lists.modal.count(first) > 0 ||
         lists.question.count(first) > 0;
}

bool slogan_feature(std::string_view fragment) {
  const std::string lowered = to_lower(trim_space(fragment));
  return lowered.starts_with("#") || starts_with_phrase(lowered, "we will");
}

bool supplement_feature(std::u32string_view article_text, std::size_t start,
                        std::size_t end) {
  end = std::min(end, article_text.size());
  while (start < end && is_space(article_text[start])) ++start;
  while (end > start && is_space(article_text[end - 1])) --end;
  if (start >= end) return false;
  const bool open = article_text[start] == U'(' ||
                    (start > 0 && article_text[start - 1] == U'(');
  const bool close = article_text[end - 1] == U')' ||
                     (end < article_text.size() && article_text[end] == U')');
  if (open && close) return true;
  const std::u32string head = to_lower(article_text.substr(start, 4));
  return head == U"who ";
}

EmotionVector emotion_vector(std::string_view fragment, const EmotionLexicon& lexicon) {
  EmotionVector sum{};
  std::size_t hits = 0;
  for (const std::string& w : word_tokens(fragment)) {
    if (!lexicon.contains(w)) continue;
    const EmotionVector v = lexicon.lookup(w);
    for (std::size_t k = 0; k < kEmotionDims; ++k) sum[k] += v[k];
    ++hits;
  }
  if (hits > 0) {
    for (double& x : sum) x /= static_cast<double>(hits);
  }
  return sum;
}

FeatureVector build_feature_vector(const Fragment& fragment, const Article& article,
                                   const TfidfModel& tfidf, const EmotionLexicon& lexicon,
                                   const WordLists& lists) {
  FeatureVector fv;
  fv.length = static_cast<double>(fragment.end - fragment.start);
  fv.tfidf = tfidf.transform(fragment.text);
  fv.repetition = repetition_feature(fragment.text, article.utf8());
  fv.superlative = superlative_feature(fragment.text, lists);
  fv.whatabout = whatabout_feature(fragment.text);
  fv.doubt = doubt_feature(fragment.text, lists);
  fv.slogan = slogan_feature(fragment.text);
  fv.supplement = supplement_feature(article.text, fragment.start, fragment.end);
  fv.emotion = emotion_vector(fragment.text, lexicon);
  return fv;
}

std::vector<double> to_dense(const FeatureVector& fv, std::size_t vocabulary_size) {
  std::vector<double> out(kDenseFixedColumns + vocabulary_size, 0.0);
  out[0] = fv.length;
  out[1] = fv.repetition ? 1.0 : 0.0;
  out[2] = fv.superlative ? 1.0 : 0.0;
  out[3] = fv.whatabout ? 1.0 : 0.0;
  out[4] = fv.doubt ? 1.0 : 0.0;
  out[5] = fv.slogan ? 1.0 : 0.0;
  out[6] = fv.supplement ? 1.0 : 0.0;
  for (std::size_t k = 0; k < kEmotionDims; ++k) out[7 + k] = fv.emotion[k];
  for (const auto& [col, v] : fv.tfidf) {
    if (col >= vocabulary_size) throw Error("TF-IDF column out of range");
    out[kDenseFixedColumns + col] = v;
  }
  return out;
}

std::vector<std::string> dense_feature_names(const TfidfModel& tfidf,
                                             const EmotionLexicon& lexicon) {
  std::vector<std::string> names = {"length", "repetition", "superlative", "whatabout",
                                    "doubt",  "slogan",     "supplement"};
  for (const std::string& d : lexicon.dimensions()) names.push_back("emo_" + d);
  for (const std::string& t : tfidf.tokens()) names.push_back("tfidf_" + t);
  return names;
}

void write_feature_dump(std::ostream& out, const std::vector<Fragment>& fragments,
                        const std::vector<FeatureVector>& features,
                        const EmotionLexicon& lexicon) {
  if (fragments.size() != features.size()) {
    throw Error("feature dump: fragment and feature counts differ");
  }
  out << "fragment_id\tlength\trepetition\tsuperlative\twhatabout\tdoubt\tslogan\tsupplement";
  for (const std::string& d : lexicon.dimensions()) out << "\temo_" << d;
  out << "\ttfidf_nnz\n";
  for (std::size_t i = 0; i < fragments.size(); ++i) {
    const FeatureVector& fv = features[i];
    out << fragments[i].id() << '\t' << format_double(fv.length) << '\t'
        << fv.repetition << '\t' << fv.superlative << '\t' << fv.whatabout << '\t'
        << fv.doubt << '\t' << fv.slogan << '\t' << fv.supplement;
    for (double e : fv.emotion) out << '\t' << format_double(e);
    out << '\t' << fv.tfidf.size() << '\n';
  }
}

}  // namespace propaganda
