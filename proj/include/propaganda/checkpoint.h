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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace propaganda {

struct Tensor {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
};

// Text checkpoint shared by every trained model:
//   PDCKPT1 <kind>
//   meta <key> <value>
//   tensor <name> <rows> <cols>
//   <cols floats>            (rows lines)
//   end
// Floats use the shortest round-trip decimal form, so save/load is exact.
struct Checkpoint {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<Tensor> tensors;

  void set_meta(std::string key, std::string value);
  const std::string& meta_value(std::string_view key) const;
  double meta_double(std::string_view key) const;
  std::size_t meta_size(std::string_view key) const;
  const Tensor& tensor(std::string_view name) const;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace propaganda
