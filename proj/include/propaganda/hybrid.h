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
#include <vector>

#include "propaganda/corpus.h"
#include "propaganda/technique.h"

namespace propaganda {

enum class Submodel { kBase, kCostWeighted, kLr };

std::string_view submodel_name(Submodel s);
Submodel parse_submodel(std::string_view name);

// Which submodel owns each technique.
struct RoutingTable {
  std::array<Submodel, kNumTechniques> owner{};

  Submodel owner_of(Technique t) const { return owner[index_of(t)]; }

  // Repetition -> lr, the minority classes -> cost_weighted, rest -> base.
  static RoutingTable defaults();
};

// `technique=submodel` lines applied on top of the default table; blank
// lines and '#' comments are ignored.
RoutingTable parse_routing_table(std::istream& in);
RoutingTable load_routing_table(const std::filesystem::path& path);

// Priority resolution: lr's prediction if lr owns it, else cost_weighted's
// prediction if cost_weighted owns it, else base's prediction.
Technique route_one(Technique base, Technique cost_weighted, Technique lr,
                    const RoutingTable& table);

struct SubmodelPredictions {
  std::vector<Technique> base;
  std::vector<Technique> cost_weighted;
  std::vector<Technique> lr;
};

// Throws Error when the three prediction lists differ in length.
std::vector<Technique> route(const SubmodelPredictions& predictions, const RoutingTable& table);

struct PosTaggedFragment {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
};

// Built-in tagger covering the tags the correction rules read (NN, NNS, JJ)
// with a closed-class lexicon and suffix rules. Punctuation tokens are kept
// with Penn-style punctuation tags.
PosTaggedFragment pos_tag(std::string_view fragment);

// Sidecar tags (`fragment_id<TAB>space-joined tags`) take precedence over
// the built-in tagger.
class PosTagger {
 public:
  PosTagger() = default;
  explicit PosTagger(std::map<std::string, std::vector<std::string>> sidecar)
      : sidecar_(std::move(sidecar)) {}

  // Throws FormatError if a sidecar entry disagrees with the token count.
  PosTaggedFragment tag(const Fragment& fragment) const;

 private:
  std::map<std::string, std::vector<std::string>> sidecar_;
};

std::map<std::string, std::vector<std::string>> parse_pos_sidecar(std::istream& in);
std::map<std::string, std::vector<std::string>> load_pos_sidecar(
    const std::filesystem::path& path);

// POS rule correction. Fires only for a Repetition prediction whose
// fragment occurs fewer than three times in the article. Ignoring
// punctuation, tags (NN NN), (NN NNS) or (NNS) become Name_Calling,Labeling;
// (JJ) or (NN) become Loaded_Language. Anything else is left unchanged.
Technique correct(std::string_view fragment, Technique predicted, std::string_view article_text,
                  const PosTaggedFragment& pos);

// Per-article union of several SI prediction sets, overlaps merged. Output
// sorted by article id, then start.
std::vector<SpanAnnotation> union_si_predictions(
    const std::vector<std::vector<SpanAnnotation>>& prediction_sets);

}  // namespace propaganda
