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

#ifndef PATTERNRANK_DOCUMENT_HPP_
#define PATTERNRANK_DOCUMENT_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace patternrank {

// The six-symbol alphabet that patterns are matched over.
enum class CoarseTag : std::uint8_t { kNoun, kAdj, kVbg, kVbn, kHyph, kOther };

inline constexpr std::size_t kNumCoarseTags = 6;

inline constexpr std::array<CoarseTag, kNumCoarseTags> kAllCoarseTags = {
    CoarseTag::kNoun, CoarseTag::kAdj,  CoarseTag::kVbg,
    CoarseTag::kVbn,  CoarseTag::kHyph, CoarseTag::kOther};

inline constexpr std::string_view coarse_name(CoarseTag tag) {
  switch (tag) {
    case CoarseTag::kNoun: return "NOUN";
    case CoarseTag::kAdj: return "ADJ";
    case CoarseTag::kVbg: return "VBG";
    case CoarseTag::kVbn: return "VBN";
    case CoarseTag::kHyph: return "HYPH";
    case CoarseTag::kOther: return "OTHER";
  }
  return "OTHER";
}

inline std::optional<CoarseTag> coarse_from_name(std::string_view name) {
  for (CoarseTag tag : kAllCoarseTags) {
    if (coarse_name(tag) == name) return tag;
  }
  return std::nullopt;
}

// Canonical Penn -> coarse mapping. Proper nouns (NNP, NNPS) count as NOUN.
inline constexpr CoarseTag coarse_of(std::string_view penn) {
  if (penn.starts_with("NN")) return CoarseTag::kNoun;
  if (penn.starts_with("JJ")) return CoarseTag::kAdj;
  if (penn == "VBG") return CoarseTag::kVbg;
  if (penn == "VBN") return CoarseTag::kVbn;
  if (penn == "HYPH") return CoarseTag::kHyph;
  return CoarseTag::kOther;
}

struct PosTag {
  std::string penn;
  CoarseTag coarse = CoarseTag::kOther;

  PosTag() = default;
  explicit PosTag(std::string penn_tag)
      : penn(std::move(penn_tag)), coarse(coarse_of(penn)) {}

  friend bool operator==(const PosTag&, const PosTag&) = default;
};

// A slice of the source text. Offsets are UTF-8 byte offsets, [start, end).
struct Token {
  std::string surface;
  std::size_t start = 0;
  std::size_t end = 0;
  bool is_hyphen = false;

  friend bool operator==(const Token&, const Token&) = default;
};

struct TaggedToken {
  Token token;
  PosTag tag;

  friend bool operator==(const TaggedToken&, const TaggedToken&) = default;
};

struct TaggedDocument {
  std::string doc_id;
  std::string text;
  std::vector<TaggedToken> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }

  std::vector<CoarseTag> coarse_tags() const {
    std::vector<CoarseTag> tags;
    tags.reserve(tokens.size());
    for (const auto& t : tokens) tags.push_back(t.tag.coarse);
    return tags;
  }

  friend bool operator==(const TaggedDocument&, const TaggedDocument&) = default;
};

// ASCII-only lowercasing; multibyte UTF-8 sequences pass through untouched.
inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace patternrank

#endif  // PATTERNRANK_DOCUMENT_HPP_
