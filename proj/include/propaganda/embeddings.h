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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "propaganda/text.h"

namespace propaganda {

// Per-token vectors for one context. Row 0 stands for the whole context,
// rows 1..n for its tokens in order.
class EmbeddingSequence {
 public:
  EmbeddingSequence() = default;
  // Throws FormatError unless `values.size()` is a positive multiple of dim
  // and every entry is finite.
  EmbeddingSequence(std::string context_id, std::size_t dim,
                    std::vector<double> values);

  const std::string& context_id() const { return context_id_; }
  std::size_t dim() const { return dim_; }
  std::size_t rows() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
  std::size_t num_tokens() const { return rows() == 0 ? 0 : rows() - 1; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * dim_, dim_);
  }
  const std::vector<double>& values() const { return values_; }

  // Keeps row 0 and at most `max_tokens` token rows.
  EmbeddingSequence truncated(std::size_t max_tokens) const;

 private:
  std::string context_id_;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

using EmbeddingMap = std::map<std::string, EmbeddingSequence>;

// Plain-text embedding file:
//   PDEMB1 <dim>
//   CTX <context_id> <n_rows>
//   <dim space-separated floats>   (n_rows lines, row 0 first)
EmbeddingMap load_embeddings(const std::filesystem::path& path);
EmbeddingMap parse_embeddings(std::istream& in);
void write_embeddings(std::ostream& out, std::size_t dim,
                      const std::vector<EmbeddingSequence>& sequences);

// Deterministic stand-in for a contextual encoder. Each token maps to a
// pseudo-random vector in [-1,1]^dim keyed on its lowercased text and the
// seed; row 0 is the mean of the token rows. Lets the whole pipeline run
// without model weights.
class FakeEncoder {
 public:
  FakeEncoder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {}

  std::size_t dim() const { return dim_; }
  std::vector<double> token_vector(std::u32string_view token) const;
  EmbeddingSequence encode(std::string context_id, std::u32string_view text,
                           const std::vector<CharRange>& tokens) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

}  // namespace propaganda
