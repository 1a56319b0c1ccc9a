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

#include <json.hpp>

#include "oracles.h"
#include "propaganda/error.h"
#include "propaganda/eval.h"
#include "propaganda/random.h"

using namespace propaganda;

TEST_CASE("SI hand cases") {
  const std::vector<SpanAnnotation> g = {{"1", 0, 10}};
  SpanScore s = score_si(g, g);
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 1.0);
  CHECK(s.f1 == 1.0);

  s = score_si({{"1", 5, 15}}, {{"1", 0, 10}});
  CHECK(s.precision == 0.5);
  CHECK(s.recall == 0.5);
  CHECK(s.f1 == 0.5);

  s = score_si(g, {});
  CHECK(s.precision == 0.0);
  CHECK(s.recall == 0.0);
  CHECK(s.f1 == 0.0);

  s = score_si({}, {});
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 1.0);

  CHECK_THROWS_AS(score_si(g, {{"1", 0, 5}, {"1", 4, 8}}), Error);
  // Same offsets in another article do not overlap.
  s = score_si(g, {{"2", 0, 10}});
  CHECK(s.f1 == 0.0);
}

TEST_CASE("SI properties") {
  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    std::vector<SpanAnnotation> gold, pred;
    for (int i = 0; i < 3; ++i) {
      const std::size_t s = 20 * i + rng.below(10);
      gold.push_back({"a", s, s + 1 + rng.below(9)});
      const std::size_t p = 20 * i + rng.below(10);
      pred.push_back({"a", p, p + 1 + rng.below(9)});
    }
    const SpanScore fwd = score_si(gold, pred);
    const SpanScore rev = score_si(pred, gold);
    CHECK(fwd.precision == rev.recall);
    CHECK(fwd.recall == rev.precision);
    CHECK(fwd.f1 <= (fwd.precision + fwd.recall) / 2 + 1e-15);
    auto more = pred;
    more.push_back({"a", 200, 205});
    const SpanScore worse = score_si(gold, more);
    if (fwd.precision > 0) CHECK(worse.precision < fwd.precision);
    else CHECK(worse.precision == 0.0);
    CHECK(worse.recall == fwd.recall);
  }
}

TEST_CASE("SI random cases agree with the per-character oracle") {
  Rng rng(19);
  for (int t = 0; t < 200; ++t) {
    std::vector<SpanAnnotation> gold, pred;
    std::vector<oracle::Span> og, op;
    for (const char* art : {"x", "y"}) {
      std::size_t cursor = rng.below(5);
      for (std::size_t k = rng.below(4); k > 0; --k) {
        const std::size_t len = 1 + rng.below(12);
        gold.push_back({art, cursor, cursor + len});
        og.push_back({art, cursor, cursor + len});
        cursor += len + rng.below(6);
      }
      cursor = rng.below(5);
      for (std::size_t k = rng.below(4); k > 0; --k) {
        const std::size_t len = 1 + rng.below(12);
        pred.push_back({art, cursor, cursor + len});
        op.push_back({art, cursor, cursor + len});
        cursor += len + rng.below(6);
      }
    }
    const auto [p, r] = oracle::partial_match(og, op);
    const SpanScore s = score_si(gold, pred);
    CHECK(std::abs(s.precision - p) < 1e-12);
    CHECK(std::abs(s.recall - r) < 1e-12);
  }
}

TEST_CASE("TC scoring") {
  const std::vector<Technique> g = {Technique::kDoubt, Technique::kSlogans};
  CHECK(score_tc(g, g).micro_f1 == 1.0);
  CHECK(score_tc(g, {Technique::kDoubt, Technique::kDoubt}).micro_f1 == 0.5);
  CHECK_THROWS_AS(score_tc(g, {Technique::kDoubt}), Error);

  // 20-fragment confusion fixture.
  const std::vector<int> gi = {0, 0, 0, 1, 1, 2, 2, 2, 3, 4, 5, 5, 6, 7, 8, 9, 10, 11, 12, 13};
  const std::vector<int> pi = {0, 1, 0, 1, 0, 2, 3, 2, 3, 4, 5, 0, 6, 7, 8, 2, 10, 13, 12, 13};
  std::vector<Technique> gt, pt;
  for (int v : gi) gt.push_back(technique_at(v));
  for (int v : pi) pt.push_back(technique_at(v));
  const TcScore s = score_tc(gt, pt);
  const auto o = oracle::confusion_f1(gi, pi, 14);
  for (std::size_t c = 0; c < 14; ++c) CHECK(std::abs(s.per_class_f1[c] - o.per_class_f1[c]) < 1e-12);
  CHECK(std::abs(s.micro_f1 - o.micro_f1) < 1e-12);
  CHECK(s.micro_f1 == doctest::Approx(14.0 / 20.0));
  CHECK(s.support[0] == 3);
}

TEST_CASE("TC fragment matching") {
  const Fragment f1{"1", 0, 4, "abcd"}, f2{"1", 5, 9, "efgh"};
  const std::vector<TechniqueLabeledFragment> gold = {{f1, Technique::kDoubt}, {f2, Technique::kSlogans}};
  const std::vector<TechniqueLabeledFragment> pred = {{f2, Technique::kSlogans}, {f1, Technique::kRepetition}};
  CHECK(score_tc(gold, pred).micro_f1 == 0.5);
  CHECK_THROWS_AS(score_tc(gold, {{f1, Technique::kDoubt}}), Error);
}

TEST_CASE("reports") {
  const SpanScore s = score_si({{"1", 0, 10}}, {{"1", 0, 10}});
  CHECK(format_si_report(s).find("F1:        1.000000") != std::string::npos);
  const std::string jl = format_si_jsonl(s);
  const auto first = nlohmann::json::parse(jl.substr(0, jl.find('\n')));
  CHECK(first["f1"] == 1.0);
  const TcScore t = score_tc({Technique::kDoubt}, {Technique::kDoubt});
  const std::string tr = format_tc_report(t);
  CHECK(tr.find("Loaded_Language") < tr.find("Bandwagon"));
  std::size_t lines = 0;
  for (char c : format_tc_jsonl(t)) lines += c == '\n';
  CHECK(lines == 15);
}
