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

#include "propaganda/checkpoint.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "propaganda/error.h"
#include "propaganda/text.h"

namespace propaganda {

void Checkpoint::set_meta(std::string key, std::string value) {
  for (auto& [k, v] : meta) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  meta.emplace_back(std::move(key), std::move(value));
}

const std::string& Checkpoint::meta_value(std::string_view key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  throw FormatError("checkpoint (" + kind + ") lacks meta key '" + std::string(key) + "'");
}

double Checkpoint::meta_double(std::string_view key) const {
  const std::string& s = meta_value(key);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    // from_chars rejects "inf"; accept the spelled-out infinity too.
    if (s == "inf") return INFINITY;
    throw FormatError("checkpoint meta '" + std::string(key) + "' is not a number");
  }
  return v;
}

std::size_t Checkpoint::meta_size(std::string_view key) const {
  const std::string& s = meta_value(key);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("checkpoint meta '" + std::string(key) + "' is not an integer");
  }
  return v;
}

const Tensor& Checkpoint::tensor(std::string_view name) const {
  for (const Tensor& t : tensors) {
    if (t.name == name) return t;
  }
  throw FormatError("checkpoint (" + kind + ") lacks tensor '" + std::string(name) + "'");
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out << "PDCKPT1 " << ckpt.kind << '\n';
  for (const auto& [k, v] : ckpt.meta) out << "meta " << k << ' ' << v << '\n';
  for (const Tensor& t : ckpt.tensors) {
    if (t.values.size() != t.rows * t.cols) {
      throw Error("tensor " + t.name + " has inconsistent shape");
    }
    out << "tensor " << t.name << ' ' << t.rows << ' ' << t.cols << '\n';
    for (std::size_t r = 0; r < t.rows; ++r) {
      for (std::size_t c = 0; c < t.cols; ++c) {
        if (c > 0) out << ' ';
        out << format_double(t.values[r * t.cols + c]);
      }
      out << '\n';
    }
  }
  out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  Checkpoint ckpt;
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("PDCKPT1 ")) {
    throw FormatError("not a PDCKPT1 checkpoint");
  }
  ckpt.kind = std::string(trim(std::string_view(line).substr(8)));
  bool ended = false;
  while (std::getline(in, line)) {
    if (line == "end") {
      ended = true;
      break;
    }
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "meta") {
      std::string key;
      ls >> key;
      std::string value;
      std::getline(ls, value);
      ckpt.meta.emplace_back(key, std::string(trim(value)));
    } else if (tag == "tensor") {
      Tensor t;
      if (!(ls >> t.name >> t.rows >> t.cols)) throw FormatError("bad tensor header: " + line);
      t.values.reserve(t.rows * t.cols);
      for (std::size_t r = 0; r < t.rows; ++r) {
        if (!std::getline(in, line)) throw FormatError("truncated tensor " + t.name);
        std::size_t got = 0;
        for (std::string_view f : split(trim(line), ' ')) {
          if (f.empty()) continue;
          double v = 0.0;
          auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
          if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
            throw FormatError("bad value in tensor " + t.name);
          }
          t.values.push_back(v);
          ++got;
        }
        if (got != t.cols) throw FormatError("tensor " + t.name + " row has wrong width");
      }
      ckpt.tensors.push_back(std::move(t));
    } else if (!trim(line).empty()) {
      throw FormatError("unexpected checkpoint line: " + line);
    }
  }
  if (!ended) throw FormatError("checkpoint truncated (no 'end')");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace propaganda
