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

#ifndef PATTERNRANK_MATCHER_HPP_
#define PATTERNRANK_MATCHER_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "patternrank/document.hpp"
#include "patternrank/error.hpp"
#include "patternrank/pattern.hpp"

namespace patternrank {

// Thompson NFA over coarse tags. Immutable once built.
class Matcher {
 public:
  // Label of a consuming edge: a coarse tag index, or kAny for {.*}.
  static constexpr int kEpsilon = -1;
  static constexpr int kAny = static_cast<int>(kNumCoarseTags);

  struct State {
    int label = kEpsilon;
    int next = -1;              // target of the consuming edge
    std::vector<int> epsilon;   // epsilon successors
  };

  explicit Matcher(const PatternAst& ast) {
    Fragment f = build(ast);
    start_ = f.in;
    accept_ = f.out;
    close_all();
  }

  std::size_t num_states() const { return states_.size(); }
  int start_state() const { return start_; }
  int accept_state() const { return accept_; }
  const std::vector<State>& states() const { return states_; }

  // True iff the whole non-empty sequence is in the pattern's language.
  bool accepts(std::span<const CoarseTag> tags) const {
    if (tags.empty()) return false;
    Set current = closure_[start_];
    for (CoarseTag t : tags) {
      current = step(current, t);
      if (current.states.empty() && !current.accepting) return false;
    }
    return current.accepting;
  }

  // Length of the longest non-empty prefix of tags[start..] the matcher
  // accepts; 0 if none.
  std::size_t longest_match(std::span<const CoarseTag> tags,
                            std::size_t start) const {
    std::size_t best = 0;
    Set current = closure_[start_];
    for (std::size_t k = start; k < tags.size(); ++k) {
      current = step(current, tags[k]);
      if (current.accepting) best = k + 1 - start;
      if (current.states.empty()) break;
    }
    return best;
  }

 private:
  struct Fragment {
    int in;
    int out;
  };

  // Epsilon-closed state set, keeping only consuming states plus a flag for
  // the accept state.
  struct Set {
    std::vector<int> states;
    bool accepting = false;
  };

  int add_state() {
    states_.emplace_back();
    return static_cast<int>(states_.size() - 1);
  }

  void link(int from, int to) { states_[from].epsilon.push_back(to); }

  Fragment consume(int label) {
    Fragment f{add_state(), add_state()};
    states_[f.in].label = label;
    states_[f.in].next = f.out;
    return f;
  }

  Fragment build(const PatternNode& n) {
    using Kind = PatternNode::Kind;
    switch (n.kind) {
      case Kind::kLiteral:
        return consume(static_cast<int>(n.tag));
      case Kind::kWildcard:
        return consume(kAny);
      case Kind::kConcat: {
        Fragment whole = build(n.children.front());
        for (std::size_t i = 1; i < n.children.size(); ++i) {
          Fragment part = build(n.children[i]);
          link(whole.out, part.in);
          whole.out = part.out;
        }
        return whole;
      }
      case Kind::kAlternation: {
        Fragment f{add_state(), add_state()};
        for (const auto& c : n.children) {
          Fragment option = build(c);
          link(f.in, option.in);
          link(option.out, f.out);
        }
        return f;
      }
      case Kind::kRepeat:
        return build_repeat(n.body(), n.min, n.max);
    }
    throw InvalidArgument("unknown pattern node");
  }

  Fragment build_repeat(const PatternNode& body, std::size_t min,
                        std::size_t max) {
    const int in = add_state();
    int tail = in;
    for (std::size_t i = 0; i < min; ++i) {
      Fragment copy = build(body);
      link(tail, copy.in);
      tail = copy.out;
    }
    if (max == PatternNode::kUnbounded) {
      const int loop = add_state();
      const int out = add_state();
      link(tail, loop);
      Fragment copy = build(body);
      link(loop, copy.in);
      link(loop, out);
      link(copy.out, loop);
      return {in, out};
    }
    const int out = add_state();
    for (std::size_t i = min; i < max; ++i) {
      Fragment copy = build(body);
      link(tail, copy.in);
      link(tail, out);
      tail = copy.out;
    }
    link(tail, out);
    return {in, out};
  }

  void close_all() {
    const std::size_t n = states_.size();
    closure_.resize(n);
    std::vector<std::uint32_t> seen(n, 0);
    std::uint32_t stamp = 0;
    std::vector<int> stack;
    for (std::size_t s = 0; s < n; ++s) {
      ++stamp;
      Set& set = closure_[s];
      stack.assign(1, static_cast<int>(s));
      seen[s] = stamp;
      while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        if (u == accept_) set.accepting = true;
        if (states_[u].label != kEpsilon) set.states.push_back(u);
        for (int v : states_[u].epsilon) {
          if (seen[v] != stamp) {
            seen[v] = stamp;
            stack.push_back(v);
          }
        }
      }
      std::sort(set.states.begin(), set.states.end());
    }
  }

  Set step(const Set& from, CoarseTag tag) const {
    Set out;
    const int label = static_cast<int>(tag);
    for (int s : from.states) {
      const State& st = states_[s];
      if (st.label != kAny && st.label != label) continue;
      const Set& c = closure_[st.next];
      out.states.insert(out.states.end(), c.states.begin(), c.states.end());
      out.accepting = out.accepting || c.accepting;
    }
    std::sort(out.states.begin(), out.states.end());
    out.states.erase(std::unique(out.states.begin(), out.states.end()),
                     out.states.end());
    return out;
  }

  std::vector<State> states_;
  std::vector<Set> closure_;
  int start_ = -1;
  int accept_ = -1;
};

inline Matcher compile(const PatternAst& ast) { return Matcher(ast); }

}  // namespace patternrank

#endif  // PATTERNRANK_MATCHER_HPP_
