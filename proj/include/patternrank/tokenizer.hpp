// Copyright 2026 The PatternRank Authors.
//
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

#ifndef PATTERNRANK_TOKENIZER_HPP_
#define PATTERNRANK_TOKENIZER_HPP_

#include <cstddef>
#include <string_view>
#include <vector>

#include "patternrank/document.hpp"

namespace patternrank {

namespace detail {

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' ||
         c == '\r';
}

inline bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

// Letters, digits, and every byte of a non-ASCII UTF-8 sequence.
inline bool is_word_byte(unsigned char c) {
  return is_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c >= 0x80;
}

}  // namespace detail

// Rule-based word tokenizer.
//
// Whitespace separates tokens and is dropped. Runs of letters, digits and
// non-ASCII characters form words; a '.' or ',' flanked by digits stays inside
// the word ("3.5", "1,000"). Every other ASCII character, the hyphen-minus
// included, becomes a one-character token, so "state-of-the-art" yields
// state - of - the - art.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  const std::size_t n = text.size();
  auto at = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };

  std::size_t i = 0;
  while (i < n) {
    const unsigned char c = at(i);
    if (detail::is_space(c)) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (detail::is_word_byte(c)) {
      ++i;
      while (i < n) {
        const unsigned char d = at(i);
        if (detail::is_word_byte(d)) {
          ++i;
        } else if ((d == '.' || d == ',') && i + 1 < n &&
                   detail::is_digit(at(i - 1)) && detail::is_digit(at(i + 1))) {
          i += 2;
        } else {
          break;
        }
      }
    } else {
      ++i;
    }
    Token tok;
    tok.surface = std::string(text.substr(start, i - start));
    tok.start = start;
    tok.end = i;
    tok.is_hyphen = tok.surface == "-";
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

// True when the token has no letter, digit or non-ASCII byte.
inline bool is_punctuation_only(std::string_view surface) {
  for (char c : surface) {
    if (detail::is_word_byte(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace patternrank

#endif  // PATTERNRANK_TOKENIZER_HPP_
