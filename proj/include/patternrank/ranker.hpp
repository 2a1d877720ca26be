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

#ifndef PATTERNRANK_RANKER_HPP_
#define PATTERNRANK_RANKER_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <future>
#include <iostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "patternrank/candidates.hpp"
#include "patternrank/error.hpp"

namespace patternrank {

struct EmbeddingVector {
  std::vector<double> values;

  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> v) : values(std::move(v)) {}

  std::size_t dim() const { return values.size(); }
  bool is_zero() const {
    return std::all_of(values.begin(), values.end(),
                       [](double x) { return x == 0.0; });
  }
  bool is_finite() const {
    return std::all_of(values.begin(), values.end(),
                       [](double x) { return std::isfinite(x); });
  }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

// Maps texts to fixed-dimension vectors. Implementations must return one
// vector per input, all of the same dimension, and be deterministic for
// identical inputs within a session.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  virtual std::string name() const = 0;
  // Declared dimension; 0 when only known after the first response.
  virtual std::size_t dim() const = 0;
  virtual std::vector<EmbeddingVector> embed_batch(
      std::span<const std::string> texts) = 0;

  // Whether embed_batch may be called from several threads at once.
  virtual bool supports_concurrent_calls() const { return false; }
  // Longest document text the backend is expected to handle; 0 = no limit.
  virtual std::size_t max_chars() const { return 0; }
};

inline double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim()) throw DimensionMismatch(u.dim(), v.dim());
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.dim(); ++i) {
    dot += u.values[i] * v.values[i];
    uu += u.values[i] * u.values[i];
    vv += v.values[i] * v.values[i];
  }
  if (uu == 0.0 || vv == 0.0) throw ZeroVector();
  return dot / (std::sqrt(uu) * std::sqrt(vv));
}

struct RankedKeyphrase {
  Candidate candidate;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based

  const std::string& phrase() const { return candidate.normalized; }
};

// Score descending, then earlier first occurrence, then normalized form.
inline bool ranks_before(const RankedKeyphrase& a, const RankedKeyphrase& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.candidate.first() != b.candidate.first()) {
    return a.candidate.first() < b.candidate.first();
  }
  return a.candidate.normalized < b.candidate.normalized;
}

// Sorts and assigns ranks 1..K.
inline void finalize_ranking(std::vector<RankedKeyphrase>& ranked) {
  std::sort(ranked.begin(), ranked.end(), ranks_before);
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].rank = i + 1;
}

struct RankOptions {
  std::size_t batch_size = 64;
  // Concurrent batch requests; only used when the backend allows it.
  std::size_t max_concurrency = 1;
  // Receives the truncation warning; defaults to stderr.
  std::function<void(const std::string&)> warn;
};

namespace detail {

inline std::vector<EmbeddingVector> checked_embed(
    EmbeddingBackend& backend, std::span<const std::string> texts,
    std::size_t batch_index) {
  std::vector<EmbeddingVector> out;
  try {
    out = backend.embed_batch(texts);
  } catch (const BackendFailure& e) {
    throw BackendFailure(e.cause(), "batch " + std::to_string(batch_index) +
                                        ": " + e.what());
  }
  if (out.size() != texts.size()) {
    throw BackendFailure(BackendFailure::Cause::kProtocol,
                         "batch " + std::to_string(batch_index) + ": got " +
                             std::to_string(out.size()) + " vectors for " +
                             std::to_string(texts.size()) + " texts");
  }
  for (const auto& v : out) {
    if (v.dim() == 0 || !v.is_finite()) {
      throw BackendFailure(BackendFailure::Cause::kProtocol,
                           "batch " + std::to_string(batch_index) +
                               ": empty or non-finite vector");
    }
  }
  return out;
}

// Cosine, or 0 when either side embeds to the zero vector (for example a
// text too short to produce any features).
inline double similarity(const EmbeddingVector& doc,
                         const EmbeddingVector& phrase) {
  if (doc.is_zero() || phrase.is_zero()) {
    if (doc.dim() != phrase.dim()) throw DimensionMismatch(doc.dim(), phrase.dim());
    return 0.0;
  }
  return std::clamp(cosine(doc, phrase), -1.0, 1.0);
}

}  // namespace detail

// Ranks candidates by cosine similarity between each candidate's normalized
// string and the document text.
inline std::vector<RankedKeyphrase> rank_candidates(
    std::string_view doc_text, const std::vector<Candidate>& candidates,
    EmbeddingBackend& backend, const RankOptions& options = {}) {
  std::vector<RankedKeyphrase> ranked;
  if (candidates.empty()) return ranked;
  if (options.batch_size == 0) throw InvalidArgument("batch_size must be >= 1");

  std::string doc(doc_text);
  if (const std::size_t limit = backend.max_chars();
      limit > 0 && doc.size() > limit) {
    // Back off to a UTF-8 boundary.
    std::size_t cut = limit;
    while (cut > 0 && (static_cast<unsigned char>(doc[cut]) & 0xC0) == 0x80) --cut;
    const std::string msg = "document text truncated from " +
                            std::to_string(doc.size()) + " to " +
                            std::to_string(cut) + " bytes for backend " +
                            backend.name();
    if (options.warn) options.warn(msg);
    else std::cerr << "warning: " << msg << "\n";
    doc.resize(cut);
  }
  const std::vector<std::string> doc_batch{doc};
  const EmbeddingVector doc_vec = detail::checked_embed(backend, doc_batch, 0)[0];

  std::vector<std::string> texts;
  texts.reserve(candidates.size());
  for (const auto& c : candidates) texts.push_back(c.normalized);

  const std::size_t num_batches =
      (texts.size() + options.batch_size - 1) / options.batch_size;
  std::vector<EmbeddingVector> vectors(texts.size());
  auto run_batch = [&](std::size_t b) {
    const std::size_t lo = b * options.batch_size;
    const std::size_t hi = std::min(texts.size(), lo + options.batch_size);
    auto got = detail::checked_embed(
        backend, std::span<const std::string>(texts).subspan(lo, hi - lo), b + 1);
    std::move(got.begin(), got.end(), vectors.begin() + static_cast<long>(lo));
  };

  const std::size_t workers =
      backend.supports_concurrent_calls()
          ? std::max<std::size_t>(1, std::min(options.max_concurrency, num_batches))
          : 1;
  if (workers == 1) {
    for (std::size_t b = 0; b < num_batches; ++b) run_batch(b);
  } else {
    for (std::size_t wave = 0; wave < num_batches; wave += workers) {
      std::vector<std::future<void>> pending;
      for (std::size_t b = wave; b < std::min(num_batches, wave + workers); ++b) {
        pending.push_back(std::async(std::launch::async, run_batch, b));
      }
      // get() every future so none is left running; the first failure wins.
      std::exception_ptr first;
      for (auto& f : pending) {
        try {
          f.get();
        } catch (...) {
          if (!first) first = std::current_exception();
        }
      }
      if (first) std::rethrow_exception(first);
    }
  }

  ranked.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (vectors[i].dim() != doc_vec.dim()) {
      throw BackendFailure(BackendFailure::Cause::kProtocol,
                           "inconsistent vector dimension: " +
                               std::to_string(vectors[i].dim()) + " vs " +
                               std::to_string(doc_vec.dim()));
    }
    ranked.push_back({candidates[i], detail::similarity(doc_vec, vectors[i]), 0});
  }
  finalize_ranking(ranked);
  return ranked;
}

inline std::vector<RankedKeyphrase> top_n(std::vector<RankedKeyphrase> ranked,
                                          std::size_t n) {
  if (n == 0) throw InvalidN();
  if (ranked.size() > n) ranked.resize(n);
  return ranked;
}

// Deterministic offline backend: L2-normalized counts of the character
// trigrams of the lowercased text, hashed into `dim` buckets.
class ReferenceEmbedder final : public EmbeddingBackend {
 public:
  ReferenceEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim < 16) throw InvalidArgument("reference embedder needs dim >= 16");
  }

  std::string name() const override {
    return "reference:" + std::to_string(dim_) + ":" + std::to_string(seed_);
  }
  std::size_t dim() const override { return dim_; }
  bool supports_concurrent_calls() const override { return true; }
  std::uint64_t seed() const { return seed_; }

  // Bucket of one trigram.
  std::size_t bucket(std::string_view trigram) const {
    // FNV-1a over the seed bytes then the trigram, finished with a
    // splitmix64 mix.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int i = 0; i < 8; ++i) {
      h ^= (seed_ >> (8 * i)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
    for (char c : trigram) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    h += 0x9e3779b97f4a7c15ULL;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
    h ^= h >> 31;
    return static_cast<std::size_t>(h % dim_);
  }

  EmbeddingVector embed(std::string_view text) const {
    const std::string lower = ascii_lower(text);
    std::vector<double> v(dim_, 0.0);
    for (std::size_t i = 0; i + 3 <= lower.size(); ++i) {
      v[bucket(std::string_view(lower).substr(i, 3))] += 1.0;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& x : v) x /= norm;
    }
    return EmbeddingVector(std::move(v));
  }

  std::vector<EmbeddingVector> embed_batch(
      std::span<const std::string> texts) override {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t));
    return out;
  }

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

inline ReferenceEmbedder reference_embedder(std::size_t dim, std::uint64_t seed) {
  return ReferenceEmbedder(dim, seed);
}

}  // namespace patternrank

#endif  // PATTERNRANK_RANKER_HPP_
