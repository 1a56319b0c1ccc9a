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

#include "propaganda/embeddings.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "propaganda/error.h"
#include "propaganda/random.h"

namespace propaganda {
namespace {

std::vector<std::string_view> fields_of(std::string_view line) {
  std::vector<std::string_view> out;
  for (std::string_view f : split(trim(line), ' ')) {
    if (!f.empty()) out.push_back(f);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("embedding line " + std::to_string(line_no) +
                      ": bad number '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

EmbeddingSequence::EmbeddingSequence(std::string context_id, std::size_t dim,
                                     std::vector<double> values)
    : context_id_(std::move(context_id)), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw FormatError("embedding dim must be positive");
  if (values_.empty() || values_.size() % dim_ != 0) {
    throw FormatError("context " + context_id_ + ": " +
                      std::to_string(values_.size()) +
                      " values do not form rows of dim " + std::to_string(dim_));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw FormatError("context " + context_id_ + ": non-finite embedding value");
    }
  }
}

EmbeddingSequence EmbeddingSequence::truncated(std::size_t max_tokens) const {
  if (num_tokens() <= max_tokens) return *this;
  std::vector<double> kept(values_.begin(),
                           values_.begin() + static_cast<std::ptrdiff_t>((max_tokens + 1) * dim_));
  return EmbeddingSequence(context_id_, dim_, std::move(kept));
}

EmbeddingMap parse_embeddings(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  const auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!trim(line).empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw FormatError("empty embedding file");
  auto header = fields_of(line);
  if (header.size() != 2 || header[0] != "PDEMB1") {
    throw FormatError("embedding file must start with 'PDEMB1 <dim>'");
  }
  const auto dim = parse_number<std::size_t>(header[1], line_no);
  if (dim == 0) throw FormatError("embedding dim must be positive");

  EmbeddingMap out;
  while (next_line()) {
    auto ctx = fields_of(line);
    if (ctx.size() != 3 || ctx[0] != "CTX") {
      throw FormatError("embedding line " + std::to_string(line_no) +
                        ": expected 'CTX <context_id> <n_tokens>'");
    }
    std::string id(ctx[1]);
    const auto rows = parse_number<std::size_t>(ctx[2], line_no);
    if (rows == 0) {
      throw FormatError("context " + id + " has no rows");
    }
    std::vector<double> values;
    values.reserve(rows * dim);
    for (std::size_t r = 0; r < rows; ++r) {
      if (!next_line()) {
        throw FormatError("truncated embedding file: context " + id +
                          " expects " + std::to_string(rows) + " rows");
      }
      auto row = fields_of(line);
      if (row.size() != dim) {
        throw FormatError("truncated or malformed row at line " +
                          std::to_string(line_no) + ": expected " +
                          std::to_string(dim) + " values, got " +
                          std::to_string(row.size()));
      }
      for (std::string_view f : row) {
        const double v = parse_number<double>(f, line_no);
        if (!std::isfinite(v)) {
          throw FormatError("non-finite value at line " + std::to_string(line_no));
        }
        values.push_back(v);
      }
    }
    EmbeddingSequence seq(id, dim, std::move(values));
    if (!out.emplace(id, std::move(seq)).second) {
      throw FormatError("duplicate context id " + id + " in embedding file");
    }
  }
  return out;
}

EmbeddingMap load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return parse_embeddings(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_embeddings(std::ostream& out, std::size_t dim,
                      const std::vector<EmbeddingSequence>& sequences) {
  out << "PDEMB1 " << dim << '\n';
  for (const EmbeddingSequence& seq : sequences) {
    if (seq.dim() != dim) {
      throw Error("context " + seq.context_id() + " has dim " +
                  std::to_string(seq.dim()) + ", file dim is " +
                  std::to_string(dim));
    }
    out << "CTX " << seq.context_id() << ' ' << seq.rows() << '\n';
    for (std::size_t r = 0; r < seq.rows(); ++r) {
      const auto row = seq.row(r);
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (k > 0) out << ' ';
        out << format_double(row[k]);
      }
      out << '\n';
    }
  }
}

std::vector<double> FakeEncoder::token_vector(std::u32string_view token) const {
  Rng rng(fnv1a(encode_utf8(to_lower(token))) ^ seed_);
  std::vector<double> v(dim_);
  for (double& x : v) {
    // Quantized so the decimal file form round-trips exactly.
    x = std::round(rng.uniform(-1.0, 1.0) * 4096.0) / 4096.0;
  }
  return v;
}

EmbeddingSequence FakeEncoder::encode(std::string context_id,
                                      std::u32string_view text,
                                      const std::vector<CharRange>& tokens) const {
  std::vector<double> values((tokens.size() + 1) * dim_, 0.0);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto v = token_vector(text.substr(tokens[t].start, tokens[t].size()));
    for (std::size_t k = 0; k < dim_; ++k) {
      values[(t + 1) * dim_ + k] = v[k];
      values[k] += v[k];
    }
  }
  if (!tokens.empty()) {
    for (std::size_t k = 0; k < dim_; ++k) {
      values[k] = std::round(values[k] / static_cast<double>(tokens.size()) * 4096.0) / 4096.0;
    }
  }
  return EmbeddingSequence(std::move(context_id), dim_, std::move(values));
}

}  // namespace propaganda
