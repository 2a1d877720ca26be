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

// CoNLL-U ingestion. Only FORM (column 2) and XPOS (column 5) are used; the
// XPOS column is expected to carry Penn Treebank tags.

#ifndef PATTERNRANK_CONLLU_HPP_
#define PATTERNRANK_CONLLU_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "patternrank/document.hpp"
#include "patternrank/error.hpp"
#include "patternrank/tagger.hpp"

namespace patternrank {

namespace detail {

struct ConlluSentence {
  std::string doc_id;  // empty unless a newdoc comment preceded it
  bool starts_doc = false;
  TaggedSentence words;
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<ConlluSentence> parse_conllu(std::string_view content) {
  std::vector<ConlluSentence> out;
  ConlluSentence current;

  auto flush = [&]() {
    if (!current.words.empty() || current.starts_doc) {
      out.push_back(std::move(current));
    }
    current = ConlluSentence{};
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (trim(line).empty()) {
      flush();
      if (nl == content.size()) break;
      continue;
    }
    if (line.front() == '#') {
      std::string body = trim(line.substr(1));
      constexpr std::string_view kNewdoc = "newdoc";
      if (body.starts_with(kNewdoc)) {
        flush();
        std::string rest = trim(std::string_view(body).substr(kNewdoc.size()));
        if (rest.starts_with("id")) {
          rest = trim(std::string_view(rest).substr(2));
          if (rest.starts_with("=")) rest = trim(std::string_view(rest).substr(1));
        } else {
          rest.clear();
        }
        current.starts_doc = true;
        current.doc_id = rest;
      }
      continue;
    }

    std::vector<std::string_view> cols;
    std::size_t c = 0;
    while (true) {
      std::size_t tab = line.find('\t', c);
      if (tab == std::string_view::npos) {
        cols.push_back(line.substr(c));
        break;
      }
      cols.push_back(line.substr(c, tab - c));
      c = tab + 1;
    }
    if (cols.size() != 10) {
      throw MalformedConllu(line_no, "expected 10 tab-separated columns, got " +
                                         std::to_string(cols.size()));
    }
    // Multiword-token ranges and empty nodes carry no tag of their own.
    if (cols[0].find('-') != std::string_view::npos ||
        cols[0].find('.') != std::string_view::npos) {
      continue;
    }
    current.words.push_back({std::string(cols[1]), std::string(cols[4])});
    if (nl == content.size()) break;
  }
  flush();
  return out;
}

}  // namespace detail

// Sentences of a CoNLL-U file as (FORM, XPOS) sequences, for tagger training.
inline std::vector<TaggedSentence> load_conllu_sentences(
    std::string_view content) {
  std::vector<TaggedSentence> out;
  for (auto& s : detail::parse_conllu(content)) {
    if (!s.words.empty()) out.push_back(std::move(s.words));
  }
  return out;
}

// Rebuilds documents from a CoNLL-U stream. A "# newdoc id = X" comment opens
// a new document; sentences before the first such comment form one document
// with id "1" (later unnamed documents are numbered by position). Text is
// synthesized by joining forms with single spaces, with no space on either
// side of a HYPH token.
inline std::vector<TaggedDocument> load_conllu(std::string_view content) {
  std::vector<TaggedDocument> docs;
  for (auto& sentence : detail::parse_conllu(content)) {
    if (sentence.starts_doc || docs.empty()) {
      TaggedDocument doc;
      doc.doc_id = sentence.doc_id.empty() ? std::to_string(docs.size() + 1)
                                           : sentence.doc_id;
      docs.push_back(std::move(doc));
    }
    TaggedDocument& doc = docs.back();
    for (auto& w : sentence.words) {
      PosTag tag(std::move(w.penn));
      const bool glue = tag.penn == kHyphenTag ||
                        (!doc.tokens.empty() &&
                         doc.tokens.back().tag.penn == kHyphenTag);
      if (!doc.text.empty() && !glue) doc.text.push_back(' ');
      Token tok;
      tok.start = doc.text.size();
      doc.text += w.word;
      tok.end = doc.text.size();
      tok.is_hyphen = w.word == "-";
      tok.surface = std::move(w.word);
      doc.tokens.push_back({std::move(tok), std::move(tag)});
    }
  }
  return docs;
}

}  // namespace patternrank

#endif  // PATTERNRANK_CONLLU_HPP_
