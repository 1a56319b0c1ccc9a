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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "propaganda/corpus.h"
#include "propaganda/error.h"

using namespace propaganda;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("propdet_corpus_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

ArticleIndex single(const std::string& id, const std::string& text) {
  return index_articles({make_article(id, text)});
}

}  // namespace

TEST_CASE("load_articles") {
  const fs::path dir = scratch_dir("load");
  write(dir / "article123.txt", "abc");
  write(dir / "notes.md", "ignored");
  const auto arts = load_articles(dir);
  REQUIRE(arts.size() == 1);
  CHECK(arts[0].id == "123");
  CHECK(arts[0].text == U"abc");

  CHECK(load_articles(scratch_dir("empty")).empty());
  CHECK_THROWS_AS(load_articles(dir / "missing"), Error);
}

TEST_CASE("duplicate id through a symlinked directory") {
  const fs::path dir = scratch_dir("dup");
  fs::create_directories(dir / "a");
  write(dir / "a" / "article7.txt", "seven");
  fs::create_directory_symlink(dir / "a", dir / "b");
  CHECK_THROWS_AS(load_articles(dir), Error);
}

TEST_CASE("CRLF folded to LF") {
  CHECK(make_article("1", "a\r\nb").text == U"a\nb");
}

TEST_CASE("SI labels") {
  std::istringstream one("111\t5\t12\n");
  const auto spans = parse_si_labels(one);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0] == SpanAnnotation{"111", 5, 12});

  std::istringstream bad("111\t12\t5\n");
  CHECK_THROWS_AS(parse_si_labels(bad), FormatError);

  std::istringstream blank("1\t0\t2\n\n1\t3\t4\n");
  CHECK(parse_si_labels(blank).size() == 2);

  const ArticleIndex idx = single("1", "short");
  std::istringstream oob("1\t0\t9\n");
  CHECK_THROWS_AS(parse_si_labels(oob, &idx), FormatError);
}

TEST_CASE("TC labels") {
  const ArticleIndex idx = single("111", "#NeverAgain will we forget");
  std::istringstream in("111\tSlogans\t0\t9\n");
  const auto frags = parse_tc_labels(in, idx);
  REQUIRE(frags.size() == 1);
  CHECK(frags[0].fragment.text == "#NeverAga");
  CHECK(frags[0].technique == Technique::kSlogans);
  CHECK(frags[0].fragment.id() == "111_0_9");

  std::istringstream foo("111\tFoo\t0\t5\n");
  CHECK_THROWS_AS(parse_tc_labels(foo, idx), FormatError);

  std::ostringstream out;
  write_tc_labels(out, frags);
  CHECK(out.str() == "111\tSlogans\t0\t9\n");
}

TEST_CASE("fixture corpus covers every technique") {
  const auto idx = index_articles(load_articles(fs::path(TEST_DATA_DIR) / "articles"));
  const auto frags = load_tc_labels(fs::path(TEST_DATA_DIR) / "tc_labels.tsv", idx);
  CHECK(frags.size() == 14);
  std::set<Technique> seen;
  for (const auto& f : frags) seen.insert(f.technique);
  CHECK(seen.size() == 14);
  const auto unlabeled = load_fragments(fs::path(TEST_DATA_DIR) / "fragments.tsv", idx);
  CHECK(unlabeled.size() == 14);
}

TEST_CASE("emotion lexicon") {
  std::istringstream one("outraged\t0.964\tanger\n");
  const EmotionLexicon lex = parse_emotion_lexicon(one);
  const EmotionVector v = lex.lookup("Outraged");
  CHECK(v[0] == 0.964);
  for (std::size_t i = 1; i < kEmotionDims; ++i) CHECK(v[i] == 0.0);

  std::istringstream empty("");
  const EmotionLexicon none = parse_emotion_lexicon(empty);
  CHECK(none.size() == 0);
  CHECK(none.lookup("anything") == EmotionVector{});

  std::istringstream two("word\tscore\tdim\nbleak\t0.5\tsadness\nbleak\t0.25\tfear\n");
  const EmotionLexicon lex2 = parse_emotion_lexicon(two);
  const auto& dims = lex2.dimensions();
  const EmotionVector b = lex2.lookup("bleak");
  for (std::size_t i = 0; i < kEmotionDims; ++i) {
    if (dims[i] == "sadness") CHECK(b[i] == 0.5);
    else if (dims[i] == "fear") CHECK(b[i] == 0.25);
    else CHECK(b[i] == 0.0);
  }

  std::istringstream range("x\t1.5\tanger\n");
  CHECK_THROWS_AS(parse_emotion_lexicon(range), FormatError);
  std::istringstream dim("x\t0.5\thunger\n");
  CHECK_THROWS_AS(parse_emotion_lexicon(dim), FormatError);

  std::ostringstream out;
  write_emotion_lexicon(out, lex2);
  std::istringstream back(out.str());
  CHECK(parse_emotion_lexicon(back).lookup("bleak") == b);
}
