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
#include <optional>
#include <string>
#include <string_view>

namespace propaganda {

// The 14 technique labels, in the row order of the training-set count table.
// Enumerator values are used as class indices everywhere and never change.
enum class Technique : int {
  kLoadedLanguage = 0,
  kNameCalling,
  kRepetition,
  kDoubt,
  kExaggeration,
  kAppealToFear,
  kFlagWaving,
  kCausalOversimplification,
  kAppealToAuthority,
  kSlogans,
  kBlackAndWhiteFallacy,
  kWhataboutism,
  kThoughtTerminatingCliches,
  kBandwagon,
};

inline constexpr std::size_t kNumTechniques = 14;

inline constexpr std::array<std::string_view, kNumTechniques> kTechniqueLabels = {
    "Loaded_Language",
    "Name_Calling,Labeling",
    "Repetition",
    "Doubt",
    "Exaggeration,Minimisation",
    "Appeal_to_fear-prejudice",
    "Flag-Waving",
    "Causal_Oversimplification",
    "Appeal_to_Authority",
    "Slogans",
    "Black-and-White_Fallacy",
    "Whataboutism,Straw_Men,Red_Herring",
    "Thought-terminating_Cliches",
    "Bandwagon,Reductio_ad_hitlerum",
};

// Occurrences of each technique in the shared-task training set.
inline constexpr std::array<long, kNumTechniques> kTrainingCounts = {
    2199, 1105, 621, 496, 493, 321, 250, 212, 155, 138, 112, 109, 80, 77,
};

// Techniques with fewer training occurrences than this are minority classes.
inline constexpr long kMinorityThreshold = 110;

constexpr std::size_t index_of(Technique t) { return static_cast<std::size_t>(t); }

constexpr Technique technique_at(std::size_t index) {
  return static_cast<Technique>(static_cast<int>(index));
}

constexpr std::string_view label_of(Technique t) {
  return kTechniqueLabels[index_of(t)];
}

std::optional<Technique> parse_technique(std::string_view label);

// Same as parse_technique but throws FormatError naming all valid labels.
Technique technique_from_label(std::string_view label);

inline bool is_minority(Technique t) {
  return kTrainingCounts[index_of(t)] < kMinorityThreshold;
}

}  // namespace propaganda
