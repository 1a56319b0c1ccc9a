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

#include "propaganda/corpus.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "propaganda/error.h"

namespace propaganda {
namespace {

namespace fs = std::filesystem;

std::size_t parse_index(std::string_view field, std::size_t line_no,
                        std::string_view what) {
  std::size_t value = 0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw FormatError("line " + std::to_string(line_no) + ": bad " +
                      std::string(what) + " '" + std::string(field) + "'");
  }
  return value;
}

void check_bounds(std::size_t start, std::size_t end, const std::string& id,
                  const ArticleIndex* articles, std::size_t line_no) {
  const std::string where = "line " + std::to_string(line_no) + ": ";
  if (start >= end) {
    throw FormatError(where + "start " + std::to_string(start) +
                      " >= end " + std::to_string(end));
  }
  if (articles == nullptr) return;
  auto it = articles->find(id);
  if (it == articles->end()) {
    throw FormatError(where + "unknown article '" + id + "'");
  }
  if (end > it->second.text.size()) {
    throw FormatError(where + "end " + std::to_string(end) +
                      " exceeds length " +
                      std::to_string(it->second.text.size()) + " of article " +
                      id);
  }
}

bool valid_id(std::string_view id) {
  return !id.empty() && std::none_of(id.begin(), id.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  });
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in = open_input(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error("error reading " + path.string());
  return buffer.str();
}

Article make_article(std::string id, std::string_view utf8_text) {
  if (!valid_id(id)) throw FormatError("invalid article id '" + id + "'");
  std::string normalized;
  normalized.reserve(utf8_text.size());
  for (std::size_t i = 0; i < utf8_text.size(); ++i) {
    if (utf8_text[i] == '\r' && i + 1 < utf8_text.size() &&
        utf8_text[i + 1] == '\n') {
      continue;
    }
    normalized.push_back(utf8_text[i]);
  }
  Article article{std::move(id), {}};
  try {
    article.text = decode_utf8(normalized);
  } catch (const FormatError& e) {
    throw FormatError("article " + article.id + ": " + e.what());
  }
  if (article.text.empty()) {
    throw FormatError("article " + article.id + " is empty");
  }
  return article;
}

ArticleIndex index_articles(const std::vector<Article>& articles) {
  ArticleIndex index;
  for (const Article& a : articles) {
    if (!index.emplace(a.id, a).second) {
      throw FormatError("duplicate article id " + a.id);
    }
  }
  return index;
}

const Article& find_article(const ArticleIndex& index, const std::string& id) {
  auto it = index.find(id);
  if (it == index.end()) throw FormatError("unknown article '" + id + "'");
  return it->second;
}

std::string Fragment::id() const {
  return article_id + "_" + std::to_string(start) + "_" + std::to_string(end);
}

std::vector<Article> load_articles(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error("not a directory: " + dir.string());
  }
  std::map<std::string, fs::path> seen;
  std::vector<Article> articles;
  auto it = fs::recursive_directory_iterator(
      dir, fs::directory_options::follow_directory_symlink);
  for (; it != fs::recursive_directory_iterator(); ++it) {
    // Symlink cycles would otherwise recurse forever.
    if (it.depth() > 8) it.disable_recursion_pending();
    if (!it->is_regular_file()) continue;
    const std::string name = it->path().filename().string();
    constexpr std::string_view kPrefix = "article";
    constexpr std::string_view kSuffix = ".txt";
    if (name.size() <= kPrefix.size() + kSuffix.size() ||
        !name.starts_with(kPrefix) || !name.ends_with(kSuffix)) {
      continue;
    }
    std::string id = name.substr(kPrefix.size(),
                                 name.size() - kPrefix.size() - kSuffix.size());
    auto [pos, inserted] = seen.emplace(id, it->path());
    if (!inserted) {
      throw FormatError("duplicate article id " + id + ": " +
                        pos->second.string() + " and " + it->path().string());
    }
    articles.push_back(make_article(std::move(id), read_file(it->path())));
  }
  std::sort(articles.begin(), articles.end(),
            [](const Article& a, const Article& b) { return a.id < b.id; });
  return articles;
}

std::vector<SpanAnnotation> parse_si_labels(std::istream& in,
                                            const ArticleIndex* articles) {
  std::vector<SpanAnnotation> spans;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": expected 3 tab-separated fields, got " +
                        std::to_string(fields.size()));
    }
    SpanAnnotation span{std::string(fields[0]),
                        parse_index(fields[1], line_no, "start"),
                        parse_index(fields[2], line_no, "end")};
    check_bounds(span.start, span.end, span.article_id, articles, line_no);
    spans.push_back(std::move(span));
  }
  return spans;
}

std::vector<SpanAnnotation> load_si_labels(const fs::path& path,
                                           const ArticleIndex* articles) {
  std::ifstream in = open_input(path);
  try {
    return parse_si_labels(in, articles);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_si_labels(std::ostream& out, const std::vector<SpanAnnotation>& spans) {
  for (const SpanAnnotation& s : spans) {
    out << s.article_id << '\t' << s.start << '\t' << s.end << '\n';
  }
}

std::vector<TechniqueLabeledFragment> parse_tc_labels(std::istream& in,
                                                      const ArticleIndex& articles) {
  std::vector<TechniqueLabeledFragment> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 4) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": expected 4 tab-separated fields, got " +
                        std::to_string(fields.size()));
    }
    TechniqueLabeledFragment f;
    f.fragment.article_id = std::string(fields[0]);
    try {
      f.technique = technique_from_label(fields[1]);
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
    f.fragment.start = parse_index(fields[2], line_no, "start");
    f.fragment.end = parse_index(fields[3], line_no, "end");
    check_bounds(f.fragment.start, f.fragment.end, f.fragment.article_id,
                 &articles, line_no);
    f.fragment.text = articles.at(f.fragment.article_id)
                          .slice(f.fragment.start, f.fragment.end);
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<TechniqueLabeledFragment> load_tc_labels(const fs::path& path,
                                                     const ArticleIndex& articles) {
  std::ifstream in = open_input(path);
  try {
    return parse_tc_labels(in, articles);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_tc_labels(std::ostream& out,
                     const std::vector<TechniqueLabeledFragment>& fragments) {
  for (const TechniqueLabeledFragment& f : fragments) {
    out << f.fragment.article_id << '\t' << label_of(f.technique) << '\t'
        << f.fragment.start << '\t' << f.fragment.end << '\n';
  }
}

std::vector<Fragment> load_fragments(const fs::path& path,
                                     const ArticleIndex& articles) {
  std::ifstream in = open_input(path);
  std::vector<Fragment> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3 && fields.size() != 4) {
      throw FormatError(path.string() + ": line " + std::to_string(line_no) +
                        ": expected 3 or 4 tab-separated fields");
    }
    const std::size_t off = fields.size() == 4 ? 1 : 0;
    Fragment f;
    f.article_id = std::string(fields[0]);
    f.start = parse_index(fields[1 + off], line_no, "start");
    f.end = parse_index(fields[2 + off], line_no, "end");
    check_bounds(f.start, f.end, f.article_id, &articles, line_no);
    f.text = articles.at(f.article_id).slice(f.start, f.end);
    out.push_back(std::move(f));
  }
  return out;
}

const std::array<std::string, kEmotionDims>& default_emotion_dimensions() {
  static const std::array<std::string, kEmotionDims> kDims = {
      "anger", "anticipation", "disgust", "fear",     "joy",
      "negative", "positive", "sadness", "surprise", "trust"};
  return kDims;
}

EmotionLexicon::EmotionLexicon() : dimensions_(default_emotion_dimensions()) {}

EmotionLexicon::EmotionLexicon(std::array<std::string, kEmotionDims> dimensions)
    : dimensions_(std::move(dimensions)) {}

EmotionVector EmotionLexicon::lookup(std::string_view word) const {
  auto it = entries_.find(to_lower(word));
  return it == entries_.end() ? EmotionVector{} : it->second;
}

bool EmotionLexicon::contains(std::string_view word) const {
  return entries_.count(to_lower(word)) > 0;
}

void EmotionLexicon::add(std::string_view word, std::string_view dimension,
                         double score) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw FormatError("intensity " + std::to_string(score) + " for '" +
                      std::string(word) + "' outside [0,1]");
  }
  auto dim = std::find(dimensions_.begin(), dimensions_.end(), dimension);
  if (dim == dimensions_.end()) {
    throw FormatError("unknown affect dimension '" + std::string(dimension) + "'");
  }
  entries_[to_lower(word)][static_cast<std::size_t>(dim - dimensions_.begin())] = score;
}

std::vector<std::string> EmotionLexicon::words() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [w, v] : entries_) out.push_back(w);
  std::sort(out.begin(), out.end());
  return out;
}

void write_emotion_lexicon(std::ostream& out, const EmotionLexicon& lexicon) {
  for (const std::string& w : lexicon.words()) {
    const EmotionVector v = lexicon.lookup(w);
    bool wrote = false;
    for (std::size_t k = 0; k < kEmotionDims; ++k) {
      if (v[k] == 0.0) continue;
      out << w << '\t' << format_double(v[k]) << '\t' << lexicon.dimensions()[k] << '\n';
      wrote = true;
    }
    // Keep all-zero words so they still count as lexicon hits.
    if (!wrote) out << w << "\t0\t" << lexicon.dimensions()[0] << '\n';
  }
}

EmotionLexicon parse_emotion_lexicon(std::istream& in) {
  EmotionLexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw FormatError("lexicon line " + std::to_string(line_no) +
                        ": expected word, score, dimension");
    }
    double score = 0.0;
    const std::string_view s = trim(fields[1]);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), score);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      if (line_no == 1) continue;  // header row
      throw FormatError("lexicon line " + std::to_string(line_no) +
                        ": bad score '" + std::string(s) + "'");
    }
    try {
      lexicon.add(trim(fields[0]), trim(fields[2]), score);
    } catch (const FormatError& e) {
      throw FormatError("lexicon line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lexicon;
}

EmotionLexicon load_emotion_lexicon(const fs::path& path) {
  std::ifstream in = open_input(path);
  return parse_emotion_lexicon(in);
}

}  // namespace propaganda
