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

// SingleRank baseline: a weighted co-occurrence graph over noun and
// adjective tokens, ranked with weighted PageRank; phrases score as the sum
// of their word scores.

#ifndef PATTERNRANK_SINGLERANK_HPP_
#define PATTERNRANK_SINGLERANK_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "patternrank/candidates.hpp"
#include "patternrank/document.hpp"
#include "patternrank/error.hpp"
#include "patternrank/ranker.hpp"

namespace patternrank {

struct SingleRankParams {
  std::size_t window = 10;
  double damping = 0.85;
  double tol = 1e-6;
  std::size_t max_iter = 100;
};

// Undirected graph with positive integer edge weights and no self-loops.
class CooccurrenceGraph {
 public:
  // Returns the node index, adding the word if needed.
  std::size_t add_node(const std::string& word) {
    auto [it, inserted] = index_.try_emplace(word, words_.size());
    if (inserted) {
      words_.push_back(word);
      adjacency_.emplace_back();
    }
    return it->second;
  }

  void add_weight(const std::string& a, const std::string& b, int weight = 1) {
    if (weight < 1) throw InvalidArgument("edge weight must be >= 1");
    if (a == b) return;
    const std::size_t u = add_node(a), v = add_node(b);
    adjacency_[u][v] += weight;
    adjacency_[v][u] += weight;
  }

  int weight(const std::string& a, const std::string& b) const {
    auto ia = index_.find(a), ib = index_.find(b);
    if (ia == index_.end() || ib == index_.end()) return 0;
    const auto& row = adjacency_[ia->second];
    auto it = row.find(ib->second);
    return it == row.end() ? 0 : it->second;
  }

  bool contains(const std::string& word) const { return index_.contains(word); }
  std::size_t num_nodes() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  std::size_t num_edges() const {
    std::size_t n = 0;
    for (const auto& row : adjacency_) n += row.size();
    return n / 2;
  }

  const std::vector<std::string>& words() const { return words_; }
  // Neighbour index -> weight, for node u.
  const std::map<std::size_t, int>& neighbours(std::size_t u) const {
    return adjacency_[u];
  }
  std::size_t index_of(const std::string& word) const { return index_.at(word); }

 private:
  std::vector<std::string> words_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::map<std::size_t, int>> adjacency_;
};

using WordScores = std::map<std::string, double>;

// Nodes are the lowercased NOUN/ADJ tokens; every pair of such tokens whose
// positions differ by less than `window` adds 1 to their edge.
inline CooccurrenceGraph build_graph(const TaggedDocument& doc,
                                     std::size_t window) {
  if (window < 2) throw InvalidArgument("co-occurrence window must be >= 2");
  CooccurrenceGraph g;
  std::vector<std::pair<std::size_t, std::string>> eligible;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const CoarseTag c = doc.tokens[i].tag.coarse;
    if (c == CoarseTag::kNoun || c == CoarseTag::kAdj) {
      eligible.emplace_back(i, ascii_lower(doc.tokens[i].token.surface));
      g.add_node(eligible.back().second);
    }
  }
  for (std::size_t a = 0; a < eligible.size(); ++a) {
    for (std::size_t b = a + 1; b < eligible.size(); ++b) {
      if (eligible[b].first - eligible[a].first >= window) break;
      g.add_weight(eligible[a].second, eligible[b].second);
    }
  }
  return g;
}

// s(v) = (1 - d) + d * sum_{u in adj(v)} w(u,v) / W(u) * s(u), Jacobi
// iteration from s = 1, stopping once the largest change drops below tol.
inline WordScores weighted_pagerank(const CooccurrenceGraph& graph,
                                    double damping, double tol,
                                    std::size_t max_iter) {
  if (graph.empty()) throw EmptyGraph();
  if (!(damping > 0.0 && damping < 1.0)) {
    throw InvalidArgument("damping must be in (0, 1)");
  }
  if (!(tol > 0.0)) throw InvalidArgument("tol must be > 0");

  const std::size_t n = graph.num_nodes();
  std::vector<double> out_weight(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& [v, w] : graph.neighbours(u)) out_weight[u] += w;
  }
  std::vector<double> score(n, 1.0), next(n);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    double delta = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      double sum = 0.0;
      for (const auto& [u, w] : graph.neighbours(v)) {
        sum += static_cast<double>(w) / out_weight[u] * score[u];
      }
      next[v] = (1.0 - damping) + damping * sum;
      delta = std::max(delta, std::abs(next[v] - score[v]));
    }
    score.swap(next);
    if (delta < tol) break;
  }
  WordScores out;
  for (std::size_t u = 0; u < n; ++u) out[graph.words()[u]] = score[u];
  return out;
}

inline WordScores weighted_pagerank(const CooccurrenceGraph& graph,
                                    const SingleRankParams& p = {}) {
  return weighted_pagerank(graph, p.damping, p.tol, p.max_iter);
}

// Words of a normalized phrase: split on spaces and hyphens.
inline std::vector<std::string> phrase_words(const std::string& normalized) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : normalized) {
    if (c == ' ' || c == '-') {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

// Raw summed word scores; unlike cosine rankings these are not bounded by 1.
inline std::vector<RankedKeyphrase> score_candidates(
    const std::vector<Candidate>& candidates, const WordScores& scores) {
  std::vector<RankedKeyphrase> ranked;
  ranked.reserve(candidates.size());
  for (const auto& c : candidates) {
    double total = 0.0;
    for (const auto& w : phrase_words(c.normalized)) {
      if (auto it = scores.find(w); it != scores.end()) total += it->second;
    }
    ranked.push_back({c, total, 0});
  }
  finalize_ranking(ranked);
  return ranked;
}

}  // namespace patternrank

#endif  // PATTERNRANK_SINGLERANK_HPP_
