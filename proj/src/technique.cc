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

#include "propaganda/technique.h"

#include "propaganda/error.h"

namespace propaganda {

std::optional<Technique> parse_technique(std::string_view label) {
  for (std::size_t i = 0; i < kNumTechniques; ++i) {
    if (kTechniqueLabels[i] == label) return technique_at(i);
  }
  return std::nullopt;
}

Technique technique_from_label(std::string_view label) {
  if (auto t = parse_technique(label)) return *t;
  std::string msg = "unknown technique '" + std::string(label) +
                    "'; valid labels are:";
  for (std::string_view l : kTechniqueLabels) {
    msg += " ";
    msg += l;
    msg += ";";
  }
  msg.pop_back();
  throw FormatError(msg);
}

}  // namespace propaganda
