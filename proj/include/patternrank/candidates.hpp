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

#ifndef PATTERNRANK_CANDIDATES_HPP_
#define PATTERNRANK_CANDIDATES_HPP_

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "patternrank/document.hpp"
#include "patternrank/error.hpp"
#include "patternrank/matcher.hpp"
#include "patternrank/tokenizer.hpp"

namespace patternrank {

// Half-open token index range [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct Candidate {
  std::string normalized;
  std::vector<Span> occurrences;  // sorted, non-overlapping

  std::size_t count() const { return occurrences.size(); }
  const Span& first() const { return occurrences.front(); }

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Lowercased surfaces joined by single spaces, with hyphen tokens glued to
// their neighbours: "State - of - the - art systems" -> "state-of-the-art
// systems".
inline std::string normalize_span(const TaggedDocument& doc, Span span) {
  std::string out;
  bool glue_next = false;
  for (std::size_t i = span.begin; i < span.end; ++i) {
    const Token& tok = doc.tokens[i].token;
    if (!out.empty() && !tok.is_hyphen && !glue_next) out.push_back(' ');
    out += ascii_lower(tok.surface);
    glue_next = tok.is_hyphen;
  }
  return out;
}

namespace detail {

// Groups spans by normalized form, ordered by first occurrence. Spans must
// arrive sorted by (begin, end). Within a group an occurrence that overlaps
// the previously kept one is dropped.
inline std::vector<Candidate> group_spans(const TaggedDocument& doc,
                                          const std::vector<Span>& spans) {
  std::vector<Candidate> out;
  std::unordered_map<std::string, std::size_t> index;
  for (const Span& s : spans) {
    std::string key = normalize_span(doc, s);
    auto [it, inserted] = index.try_emplace(key, out.size());
    if (inserted) {
      out.push_back({std::move(key), {s}});
      continue;
    }
    auto& occ = out[it->second].occurrences;
    if (occ.back().end <= s.begin) occ.push_back(s);
  }
  return out;
}

}  // namespace detail

// Leftmost-longest, non-overlapping scan: at each token index take the longest
// span the matcher accepts, emit it and resume after it.
inline std::vector<Span> match_spans(const TaggedDocument& doc,
                                     const Matcher& matcher) {
  const auto tags = doc.coarse_tags();
  std::vector<Span> spans;
  std::size_t i = 0;
  while (i < tags.size()) {
    const std::size_t len = matcher.longest_match(tags, i);
    if (len == 0) {
      ++i;
      continue;
    }
    spans.push_back({i, i + len});
    i += len;
  }
  return spans;
}

inline std::vector<Candidate> extract_candidates(const TaggedDocument& doc,
                                                 const Matcher& matcher) {
  return detail::group_spans(doc, match_spans(doc, matcher));
}

// Word n-grams for min_n <= n <= max_n. An n-gram is dropped when its first or
// last token is a stopword (compared lowercased) or when any of its tokens is
// punctuation only.
inline std::vector<Candidate> select_ngrams(const TaggedDocument& doc,
                                            std::size_t min_n, std::size_t max_n,
                                            const std::set<std::string>& stopwords) {
  if (min_n < 1 || min_n > max_n) {
    throw InvalidRange("n-gram range requires 1 <= min <= max, got [" +
                       std::to_string(min_n) + "," + std::to_string(max_n) + "]");
  }
  const std::size_t n = doc.tokens.size();
  std::vector<bool> punct(n), stop(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& surface = doc.tokens[i].token.surface;
    punct[i] = is_punctuation_only(surface);
    stop[i] = stopwords.contains(ascii_lower(surface));
  }
  std::vector<Span> spans;
  for (std::size_t b = 0; b < n; ++b) {
    if (punct[b] || stop[b]) continue;
    for (std::size_t len = min_n; len <= max_n && b + len <= n; ++len) {
      const std::size_t e = b + len;
      if (punct[e - 1]) break;  // every longer n-gram contains it too
      if (stop[e - 1]) continue;
      bool clean = true;
      for (std::size_t k = b + 1; k + 1 < e; ++k) {
        if (punct[k]) {
          clean = false;
          break;
        }
      }
      if (!clean) break;
      spans.push_back({b, e});
    }
  }
  return detail::group_spans(doc, spans);
}

}  // namespace patternrank

#endif  // PATTERNRANK_CANDIDATES_HPP_
