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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace propaganda::cli {

// Hyperparameters shared by the subcommands. Values come from built-in
// defaults, then an optional `key=value` config file, then explicit flags.
struct RunConfig {
  std::size_t max_seq_len = 128;
  double learning_rate = 1e-5;
  std::size_t batch_size = 4;  // recorded only; training is full-batch
  std::size_t max_iters = 300;
  double tolerance = 1e-6;
  double l2_C = 1.0;
  std::size_t deep_dim = 64;
  std::size_t sent_dim = 64;
  double si_weight = 2.0;
  std::array<double, 3> alphas = {0.25, 0.5, 0.5};
  std::uint64_t seed = 0;
  std::size_t fake_dim = 32;

  // Throws FormatError on unknown keys or unparsable values.
  void apply(const std::string& key, const std::string& value);
  void load(const std::filesystem::path& path);
};

std::array<double, 3> parse_alphas(const std::string& text);

// Entry point behind the `propdet` binary. Writes reports to `out` and
// diagnostics to `err`; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace propaganda::cli
