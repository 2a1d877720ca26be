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

#ifndef PATTERNRANK_PATTERN_HPP_
#define PATTERNRANK_PATTERN_HPP_

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "patternrank/document.hpp"
#include "patternrank/error.hpp"

namespace patternrank {

// Expression tree of a part-of-speech pattern.
//
// Grammar of the textual form:
//
//   expr    := concat ("|" concat)*
//   concat  := postfix+
//   postfix := (atom | "(" expr ")") ("?" | "*" | "+")?
//   atom    := "{" TAG "}" | "{.*}"
//
// TAG is one of NOUN, ADJ, VBG, VBN, HYPH, OTHER. Whitespace between tokens
// is ignored.
struct PatternNode {
  enum class Kind { kLiteral, kWildcard, kConcat, kAlternation, kRepeat };

  static constexpr std::size_t kUnbounded =
      std::numeric_limits<std::size_t>::max();

  Kind kind = Kind::kWildcard;
  CoarseTag tag = CoarseTag::kOther;    // kLiteral
  std::vector<PatternNode> children;    // kConcat, kAlternation: >= 1; kRepeat: 1
  std::size_t min = 0;                  // kRepeat
  std::size_t max = 0;                  // kRepeat; kUnbounded for no limit

  static PatternNode literal(CoarseTag t) {
    PatternNode n;
    n.kind = Kind::kLiteral;
    n.tag = t;
    return n;
  }
  static PatternNode wildcard() { return PatternNode{}; }
  static PatternNode concat(std::vector<PatternNode> parts) {
    if (parts.empty()) throw InvalidArgument("concat needs at least one child");
    PatternNode n;
    n.kind = Kind::kConcat;
    n.children = std::move(parts);
    return n;
  }
  static PatternNode alternation(std::vector<PatternNode> options) {
    if (options.empty()) {
      throw InvalidArgument("alternation needs at least one child");
    }
    PatternNode n;
    n.kind = Kind::kAlternation;
    n.children = std::move(options);
    return n;
  }
  static PatternNode repeat(PatternNode body, std::size_t min, std::size_t max) {
    if (min > max) throw InvalidArgument("repeat requires min <= max");
    PatternNode n;
    n.kind = Kind::kRepeat;
    n.min = min;
    n.max = max;
    n.children.push_back(std::move(body));
    return n;
  }

  const PatternNode& body() const { return children.front(); }

  friend bool operator==(const PatternNode&, const PatternNode&) = default;
};

using PatternAst = PatternNode;

namespace detail {

class PatternParser {
 public:
  explicit PatternParser(std::string_view src) : src_(src) {}

  PatternNode parse() {
    PatternNode root = expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError(pos_, "end of pattern");
    return root;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
            src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= src_.size() || src_[pos_] != c) {
      throw ParseError(pos_, std::string(1, c));
    }
    ++pos_;
  }

  PatternNode expr() {
    std::vector<PatternNode> options;
    options.push_back(concat());
    while (peek('|')) {
      ++pos_;
      options.push_back(concat());
    }
    if (options.size() == 1) return std::move(options.front());
    return PatternNode::alternation(std::move(options));
  }

  bool at_postfix_start() { return peek('{') || peek('('); }

  PatternNode concat() {
    std::vector<PatternNode> parts;
    if (!at_postfix_start()) throw ParseError(pos_, "{ or (");
    while (at_postfix_start()) parts.push_back(postfix());
    if (parts.size() == 1) return std::move(parts.front());
    return PatternNode::concat(std::move(parts));
  }

  PatternNode postfix() {
    PatternNode base;
    if (peek('(')) {
      ++pos_;
      base = expr();
      expect(')');
    } else {
      base = atom();
    }
    skip_ws();
    if (pos_ < src_.size()) {
      switch (src_[pos_]) {
        case '?':
          ++pos_;
          return PatternNode::repeat(std::move(base), 0, 1);
        case '*':
          ++pos_;
          return PatternNode::repeat(std::move(base), 0, PatternNode::kUnbounded);
        case '+':
          ++pos_;
          return PatternNode::repeat(std::move(base), 1, PatternNode::kUnbounded);
        default:
          break;
      }
    }
    return base;
  }

  PatternNode atom() {
    expect('{');
    const std::size_t name_start = pos_;
    while (pos_ < src_.size() && src_[pos_] != '}' && src_[pos_] != '{' &&
           src_[pos_] != '(' && src_[pos_] != ')' && src_[pos_] != '|') {
      ++pos_;
    }
    if (pos_ >= src_.size() || src_[pos_] != '}') {
      throw ParseError(pos_, "}");
    }
    std::string name = strip(src_.substr(name_start, pos_ - name_start));
    ++pos_;
    if (name == ".*") return PatternNode::wildcard();
    if (name.empty()) throw ParseError(name_start, "tag name");
    auto tag = coarse_from_name(name);
    if (!tag) throw UnknownTag(name);
    return PatternNode::literal(*tag);
  }

  static std::string strip(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

inline void print_node(const PatternNode& n, std::string& out);

inline void print_grouped(const PatternNode& n, std::string& out, bool group) {
  if (group) out.push_back('(');
  print_node(n, out);
  if (group) out.push_back(')');
}

inline bool is_atom(const PatternNode& n) {
  return n.kind == PatternNode::Kind::kLiteral ||
         n.kind == PatternNode::Kind::kWildcard;
}

inline void print_repeat(const PatternNode& body, std::size_t min,
                         std::size_t max, std::string& out) {
  const bool group = !is_atom(body);
  auto one = [&](const char* op) {
    print_grouped(body, out, group);
    out += op;
  };
  if (max == 0) {
    // Matches only the empty string; the surface grammar cannot say that.
    throw InvalidArgument("repeat {0,0} has no textual form");
  }
  if (min == 0 && max == 1) return one("?");
  if (min == 0 && max == PatternNode::kUnbounded) return one("*");
  if (min == 1 && max == PatternNode::kUnbounded) return one("+");
  // Counted repeats have no surface syntax; spell them out.
  out.push_back('(');
  for (std::size_t i = 0; i < min; ++i) print_grouped(body, out, group);
  if (max == PatternNode::kUnbounded) {
    one("*");
  } else {
    for (std::size_t i = min; i < max; ++i) one("?");
  }
  out.push_back(')');
}

inline void print_node(const PatternNode& n, std::string& out) {
  using Kind = PatternNode::Kind;
  switch (n.kind) {
    case Kind::kLiteral:
      out += '{';
      out += coarse_name(n.tag);
      out += '}';
      return;
    case Kind::kWildcard:
      out += "{.*}";
      return;
    case Kind::kConcat:
      for (const auto& c : n.children) {
        print_grouped(c, out, c.kind == Kind::kConcat ||
                                  c.kind == Kind::kAlternation);
      }
      return;
    case Kind::kAlternation:
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out.push_back('|');
        const auto& c = n.children[i];
        print_grouped(c, out, c.kind == Kind::kAlternation);
      }
      return;
    case Kind::kRepeat:
      print_repeat(n.body(), n.min, n.max, out);
      return;
  }
}

}  // namespace detail

inline PatternAst parse_pattern(std::string_view source) {
  return detail::PatternParser(source).parse();
}

// Textual form that parse_pattern reads back to the same tree when the tree
// uses only ?, * and + repeats with multi-child concats and alternations.
inline std::string to_string(const PatternAst& ast) {
  std::string out;
  detail::print_node(ast, out);
  return out;
}

enum class BuiltinPattern { kPatternRankPos, kNounPhrase };

inline constexpr std::string_view kPatternRankPosSource =
    "(({.*}{HYPH}{.*}){NOUN}*)|(({VBG}|{VBN})?{ADJ}*{NOUN}+)";
inline constexpr std::string_view kNounPhraseSource = "{ADJ}*{NOUN}+";

inline PatternAst builtin_pattern(BuiltinPattern which) {
  switch (which) {
    case BuiltinPattern::kPatternRankPos:
      return parse_pattern(kPatternRankPosSource);
    case BuiltinPattern::kNounPhrase:
      return parse_pattern(kNounPhraseSource);
  }
  throw InvalidArgument("unknown builtin pattern");
}

}  // namespace patternrank

#endif  // PATTERNRANK_PATTERN_HPP_
