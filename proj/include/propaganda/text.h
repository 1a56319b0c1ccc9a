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
#include <string>
#include <string_view>
#include <vector>

namespace propaganda {

// Half-open range [start, end) of character (Unicode scalar value) offsets.
struct CharRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool empty() const { return end <= start; }
  bool contains(const CharRange& other) const {
    return start <= other.start && other.end <= end;
  }
  friend bool operator==(const CharRange&, const CharRange&) = default;
};

// Throws FormatError on malformed UTF-8 (overlongs, surrogates, truncation).
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view text);

bool is_space(char32_t c);
// ASCII punctuation plus the common typographic quotes, dashes and ellipsis.
bool is_punct(char32_t c);
bool is_upper(char32_t c);
bool is_alnum(char32_t c);

// ASCII-only case folding; other code points pass through unchanged.
char32_t to_lower(char32_t c);
std::string to_lower(std::string_view utf8);
std::u32string to_lower(std::u32string_view text);

// Whitespace + punctuation tokenizer: maximal runs of non-space,
// non-punctuation characters form one token and every punctuation character
// is a token of its own. Offsets are relative to `text`.
std::vector<CharRange> tokenize(std::u32string_view text);

// Lowercased word tokens of a UTF-8 string with punctuation tokens dropped.
std::vector<std::string> word_tokens(std::string_view utf8);

// Shortest decimal form that parses back to exactly `v`.
std::string format_double(double v);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace propaganda
