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

#include "propaganda/hybrid.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>

#include "propaganda/error.h"
#include "propaganda/features.h"
#include "propaganda/segmentation.h"

namespace propaganda {
namespace {

const std::map<std::string, std::string, std::less<>>& closed_class_lexicon() {
  static const std::map<std::string, std::string, std::less<>> kLexicon = [] {
    std::map<std::string, std::string, std::less<>> m;
    const auto put = [&](std::initializer_list<const char*> words, const char* tag) {
      for (const char* w : words) m[w] = tag;
    };
    put({"a", "an", "the", "this", "that", "these", "those", "every", "each", "some",
         "any", "no", "all"},
        "DT");
    put({"of", "in", "on", "at", "by", "for", "with", "from", "into", "about", "against",
         "over", "under", "after", "before", "between", "through", "during", "without",
         "like", "as"},
        "IN");
    put({"and", "or", "but", "nor", "yet"}, "CC");
    put({"i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them"},
        "PRP");
    put({"my", "your", "his", "its", "our", "their"}, "PRP$");
    put({"is", "has", "does", "was"}, "VBZ");
    put({"are", "have", "do", "am", "were"}, "VBP");
    put({"had", "did"}, "VBD");
    put({"be"}, "VB");
    put({"been"}, "VBN");
    put({"can", "could", "may", "might", "must", "shall", "should", "will", "would"}, "MD");
    put({"not", "very", "never", "always", "too", "so", "just", "only", "even", "also"},
        "RB");
    put({"who", "what", "whom"}, "WP");
    put({"when", "where", "why", "how"}, "WRB");
    put({"which"}, "WDT");
    put({"to"}, "TO");
    put({"best", "worst", "most", "least"}, "JJS");
    put({"better", "worse", "more", "less"}, "JJR");
    put({"people", "men", "women", "children", "police"}, "NNS");
    put({"news", "warmonger", "traitor", "liar", "thug", "puppet", "bus", "virus",
         "crisis", "process", "business", "witch", "hunt", "hoax", "chaos"},
        "NN");
    put({"evil", "bad", "good", "great", "stupid", "crazy", "corrupt", "fake", "radical",
         "huge", "terrible", "horrible", "disgusting", "ridiculous", "absurd", "insane",
         "pathetic", "shameful", "brutal", "vile", "wicked", "outrageous", "massive",
         "big", "small", "new", "old", "true", "false", "real", "wrong", "free", "sick",
         "weak", "dumb", "nasty", "rotten", "deadly", "savage", "extreme", "sinister",
         "crooked", "rigged", "failing", "bloody"},
        "JJ");
    return m;
  }();
  return kLexicon;
}

std::string punct_tag(char32_t c) {
  switch (c) {
    case U'.':
    case U'!':
    case U'?': return ".";
    case U',': return ",";
    case U'#': return "#";
    case U'$': return "$";
    case U'(': return "-LRB-";
    case U')': return "-RRB-";
    case U'"':
    case 0x201C: return "``";
    case 0x201D: return "''";
    default: return ":";
  }
}

std::string suffix_tag(const std::string& w, bool sentence_initial, bool capitalized) {
  const auto& lex = closed_class_lexicon();
  if (auto it = lex.find(w); it != lex.end()) return it->second;
  if (std::all_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return "CD";
  }
  if (capitalized && !sentence_initial) return "NNP";
  if (superlative_feature(w)) return "JJS";
  const auto ends = [&](std::string_view suf, std::size_t min_len) {
    return w.size() >= min_len && w.ends_with(suf);
  };
  if (ends("ous", 5) || ends("ful", 5) || ends("ive", 5) || ends("able", 6) ||
      ends("ible", 6) || ends("less", 6) || ends("ish", 5) || ends("ic", 5) ||
      ends("al", 5) || ends("ary", 5)) {
    return "JJ";
  }
  if (ends("ly", 4)) return "RB";
  if (ends("ing", 5)) return "VBG";
  if (ends("ed", 4)) return "VBD";
  if (ends("s", 3) && !ends("ss", 3) && !ends("us", 3) && !ends("is", 3)) return "NNS";
  return "NN";
}

bool is_punct_token(const std::string& token) {
  const std::u32string t = decode_utf8(token);
  return t.size() == 1 && is_punct(t[0]);
}

}  // namespace

std::string_view submodel_name(Submodel s) {
  switch (s) {
    case Submodel::kBase: return "base";
    case Submodel::kCostWeighted: return "cost_weighted";
    case Submodel::kLr: return "lr";
  }
  return "?";
}

Submodel parse_submodel(std::string_view name) {
  if (name == "base") return Submodel::kBase;
  if (name == "cost_weighted") return Submodel::kCostWeighted;
  if (name == "lr") return Submodel::kLr;
  throw FormatError("unknown submodel '" + std::string(name) +
                    "' (expected base, cost_weighted or lr)");
}

RoutingTable RoutingTable::defaults() {
  RoutingTable table;
  for (std::size_t i = 0; i < kNumTechniques; ++i) {
    const Technique t = technique_at(i);
    table.owner[i] = t == Technique::kRepetition ? Submodel::kLr
                     : is_minority(t)            ? Submodel::kCostWeighted
                                                 : Submodel::kBase;
  }
  return table;
}

RoutingTable parse_routing_table(std::istream& in) {
  RoutingTable table = RoutingTable::defaults();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::size_t eq = t.rfind('=');
    if (eq == std::string_view::npos) {
      throw FormatError("routing line " + std::to_string(line_no) +
                        ": expected technique=submodel");
    }
    const Technique tech = technique_from_label(trim(t.substr(0, eq)));
    table.owner[index_of(tech)] = parse_submodel(trim(t.substr(eq + 1)));
  }
  return table;
}

RoutingTable load_routing_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_routing_table(in);
}

Technique route_one(Technique base, Technique cost_weighted, Technique lr,
                    const RoutingTable& table) {
  if (table.owner_of(lr) == Submodel::kLr) return lr;
  if (table.owner_of(cost_weighted) == Submodel::kCostWeighted) return cost_weighted;
  return base;
}

std::vector<Technique> route(const SubmodelPredictions& p, const RoutingTable& table) {
  if (p.base.size() != p.cost_weighted.size() || p.base.size() != p.lr.size()) {
    throw Error("route: every submodel must predict every fragment (" +
                std::to_string(p.base.size()) + "/" + std::to_string(p.cost_weighted.size()) +
                "/" + std::to_string(p.lr.size()) + ")");
  }
  std::vector<Technique> out;
  out.reserve(p.base.size());
  for (std::size_t i = 0; i < p.base.size(); ++i) {
    out.push_back(route_one(p.base[i], p.cost_weighted[i], p.lr[i], table));
  }
  return out;
}

PosTaggedFragment pos_tag(std::string_view fragment) {
  PosTaggedFragment out;
  const std::u32string text = decode_utf8(fragment);
  bool initial = true;
  for (const CharRange& r : tokenize(text)) {
    const std::u32string_view tok = std::u32string_view(text).substr(r.start, r.size());
    out.tokens.push_back(encode_utf8(tok));
    if (tok.size() == 1 && is_punct(tok[0])) {
      out.tags.push_back(punct_tag(tok[0]));
      continue;
    }
    out.tags.push_back(suffix_tag(encode_utf8(to_lower(tok)), initial, is_upper(tok[0])));
    initial = false;
  }
  return out;
}

PosTaggedFragment PosTagger::tag(const Fragment& fragment) const {
  PosTaggedFragment tagged = pos_tag(fragment.text);
  auto it = sidecar_.find(fragment.id());
  if (it == sidecar_.end()) return tagged;
  if (it->second.size() != tagged.tokens.size()) {
    throw FormatError("POS sidecar has " + std::to_string(it->second.size()) +
                      " tags for fragment " + fragment.id() + " but it has " +
                      std::to_string(tagged.tokens.size()) + " tokens");
  }
  tagged.tags = it->second;
  return tagged;
}

std::map<std::string, std::vector<std::string>> parse_pos_sidecar(std::istream& in) {
  std::map<std::string, std::vector<std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError("POS sidecar line " + std::to_string(line_no) +
                        ": expected fragment_id<TAB>tags");
    }
    std::vector<std::string> tags;
    for (std::string_view t : split(trim(std::string_view(line).substr(tab + 1)), ' ')) {
      if (!t.empty()) tags.emplace_back(t);
    }
    out[line.substr(0, tab)] = std::move(tags);
  }
  return out;
}

std::map<std::string, std::vector<std::string>> load_pos_sidecar(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_pos_sidecar(in);
}

Technique correct(std::string_view fragment, Technique predicted, std::string_view article_text,
                  const PosTaggedFragment& pos) {
  if (predicted != Technique::kRepetition) return predicted;
  if (count_occurrences(fragment, article_text) >= 3) return predicted;
  if (pos.tags.size() != pos.tokens.size()) {
    throw Error("POS tags and tokens differ in length");
  }
  std::vector<std::string_view> tags;
  for (std::size_t i = 0; i < pos.tags.size(); ++i) {
    if (!is_punct_token(pos.tokens[i])) tags.push_back(pos.tags[i]);
  }
  using Seq = std::vector<std::string_view>;
  if (tags == Seq{"NN", "NN"} || tags == Seq{"NN", "NNS"} || tags == Seq{"NNS"}) {
    return Technique::kNameCalling;
  }
  if (tags == Seq{"JJ"} || tags == Seq{"NN"}) return Technique::kLoadedLanguage;
  return predicted;
}

std::vector<SpanAnnotation> union_si_predictions(
    const std::vector<std::vector<SpanAnnotation>>& prediction_sets) {
  std::map<std::string, std::vector<SpanAnnotation>> by_article;
  for (const auto& set : prediction_sets) {
    for (const SpanAnnotation& s : set) by_article[s.article_id].push_back(s);
  }
  std::vector<SpanAnnotation> out;
  for (auto& [id, spans] : by_article) {
    auto merged = merge_overlapping(std::move(spans));
    out.insert(out.end(), merged.begin(), merged.end());
  }
  return out;
}

}  // namespace propaganda
