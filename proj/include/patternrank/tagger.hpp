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

// Greedy averaged-perceptron part-of-speech tagger.

#ifndef PATTERNRANK_TAGGER_HPP_
#define PATTERNRANK_TAGGER_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "patternrank/document.hpp"
#include "patternrank/error.hpp"
#include "patternrank/tokenizer.hpp"

namespace patternrank {

struct TaggedWord {
  std::string word;
  std::string penn;
};

using TaggedSentence = std::vector<TaggedWord>;

inline constexpr int kTaggerModelVersion = 1;
inline constexpr std::string_view kHyphenTag = "HYPH";

namespace detail {

inline constexpr std::string_view kStart1 = "-START-";
inline constexpr std::string_view kStart2 = "-START2-";
inline constexpr std::string_view kEnd = "-END-";

inline bool is_sentence_final(std::string_view word) {
  return word == "." || word == "!" || word == "?";
}

// X for uppercase, x for lowercase, d for digits, other bytes kept; runs of
// the same class collapse to one symbol.
inline std::string word_shape(std::string_view word) {
  std::string shape;
  for (char ch : word) {
    const auto c = static_cast<unsigned char>(ch);
    char s;
    if (c >= 'A' && c <= 'Z') s = 'X';
    else if (c >= 'a' && c <= 'z') s = 'x';
    else if (c >= '0' && c <= '9') s = 'd';
    else if (c >= 0x80) s = 'u';
    else s = ch;
    if (shape.empty() || shape.back() != s) shape.push_back(s);
  }
  return shape;
}

inline std::string suffix(std::string_view lower, std::size_t len) {
  if (lower.size() <= len) return std::string(lower);
  return std::string(lower.substr(lower.size() - len));
}

// Feature strings for position i. `words` holds lowercased words.
inline std::vector<std::string> tagger_features(
    std::span<const std::string> words, std::size_t i, std::string_view prev,
    std::string_view prev2, std::string_view raw) {
  const std::string& w = words[i];
  std::vector<std::string> f;
  f.reserve(10);
  f.emplace_back("bias");
  f.push_back("w=" + w);
  f.push_back("s1=" + suffix(w, 1));
  f.push_back("s2=" + suffix(w, 2));
  f.push_back("s3=" + suffix(w, 3));
  f.push_back("t-1=" + std::string(prev));
  f.push_back("t-2,t-1=" + std::string(prev2) + " " + std::string(prev));
  f.push_back("shape=" + word_shape(raw));
  f.push_back("w-1=" + (i == 0 ? std::string(kStart1) : words[i - 1]));
  f.push_back("w+1=" +
              (i + 1 == words.size() ? std::string(kEnd) : words[i + 1]));
  return f;
}

}  // namespace detail

// Immutable after construction; safe to share between threads.
class TaggerModel {
 public:
  using TagWeights = std::map<std::string, double>;
  using Weights = std::map<std::string, TagWeights>;

  TaggerModel() = default;
  TaggerModel(Weights weights, std::set<std::string> tagset,
              int iterations_trained, std::uint64_t seed)
      : weights_(std::move(weights)),
        tagset_(std::move(tagset)),
        iterations_trained_(iterations_trained),
        seed_(seed) {
    index();
  }

  const Weights& weights() const { return weights_; }
  const std::set<std::string>& tagset() const { return tagset_; }
  int iterations_trained() const { return iterations_trained_; }
  std::uint64_t seed() const { return seed_; }
  bool empty() const { return tags_.empty(); }

  // Highest-scoring tag for a feature set; ties go to the lexicographically
  // smaller tag.
  const std::string& predict(const std::vector<std::string>& features) const {
    std::vector<double> scores(tags_.size(), 0.0);
    for (const auto& f : features) {
      auto it = dense_.find(f);
      if (it == dense_.end()) continue;
      for (const auto& [tag_index, w] : it->second) scores[tag_index] += w;
    }
    std::size_t best = 0;
    for (std::size_t t = 1; t < scores.size(); ++t) {
      if (scores[t] > scores[best]) best = t;
    }
    return tags_[best];
  }

  // Tags a whole sequence. `raw` are the original surfaces.
  std::vector<std::string> tag_words(
      const std::vector<std::string>& raw) const {
    std::vector<std::string> out;
    out.reserve(raw.size());
    if (raw.empty()) return out;
    if (empty()) throw InvalidArgument("tagger model has no tags");
    std::vector<std::string> lower;
    lower.reserve(raw.size());
    for (const auto& w : raw) lower.push_back(ascii_lower(w));
    std::string prev(detail::kStart1), prev2(detail::kStart2);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      std::string guess;
      if (raw[i] == "-") {
        guess = kHyphenTag;
      } else {
        guess = predict(detail::tagger_features(lower, i, prev, prev2, raw[i]));
      }
      if (detail::is_sentence_final(raw[i])) {
        prev = detail::kStart1;
        prev2 = detail::kStart2;
      } else {
        prev2 = std::move(prev);
        prev = guess;
      }
      out.push_back(std::move(guess));
    }
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["version"] = kTaggerModelVersion;
    j["tagset"] = tagset_;
    j["features"] = weights_;
    j["seed"] = seed_;
    j["iterations_trained"] = iterations_trained_;
    return j;
  }

  // Sorted keys; byte-stable for identical models.
  std::string serialize() const { return to_json().dump(); }

  static TaggerModel from_json(const nlohmann::json& j) {
    try {
      if (j.at("version").get<int>() != kTaggerModelVersion) {
        throw ModelFormatError("unsupported tagger model version " +
                               j.at("version").dump());
      }
      return TaggerModel(j.at("features").get<Weights>(),
                         j.at("tagset").get<std::set<std::string>>(),
                         j.at("iterations_trained").get<int>(),
                         j.at("seed").get<std::uint64_t>());
    } catch (const nlohmann::json::exception& e) {
      throw ModelFormatError(std::string("bad tagger model: ") + e.what());
    }
  }

  static TaggerModel deserialize(std::string_view text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ModelFormatError(std::string("bad tagger model: ") + e.what());
    }
    return from_json(j);
  }

  friend bool operator==(const TaggerModel& a, const TaggerModel& b) {
    return a.weights_ == b.weights_ && a.tagset_ == b.tagset_ &&
           a.iterations_trained_ == b.iterations_trained_ && a.seed_ == b.seed_;
  }

 private:
  void index() {
    tags_.assign(tagset_.begin(), tagset_.end());
    std::unordered_map<std::string, std::size_t> tag_index;
    for (std::size_t i = 0; i < tags_.size(); ++i) tag_index[tags_[i]] = i;
    dense_.clear();
    dense_.reserve(weights_.size());
    for (const auto& [feature, per_tag] : weights_) {
      auto& row = dense_[feature];
      for (const auto& [tag, w] : per_tag) {
        auto it = tag_index.find(tag);
        if (it == tag_index.end()) {
          throw ModelFormatError("weight for tag '" + tag +
                                 "' outside the tagset");
        }
        row.emplace_back(it->second, w);
      }
    }
  }

  Weights weights_;
  std::set<std::string> tagset_;
  int iterations_trained_ = 0;
  std::uint64_t seed_ = 0;

  std::vector<std::string> tags_;
  std::unordered_map<std::string, std::vector<std::pair<std::size_t, double>>>
      dense_;
};

namespace detail {

// Accumulates perceptron weights plus the running totals needed to average
// them over every update step.
class PerceptronTrainer {
 public:
  explicit PerceptronTrainer(std::vector<std::string> tags)
      : tags_(std::move(tags)) {}

  std::size_t predict(const std::vector<std::string>& features) const {
    std::vector<double> scores(tags_.size(), 0.0);
    for (const auto& f : features) {
      auto it = params_.find(f);
      if (it == params_.end()) continue;
      for (const auto& [t, p] : it->second) scores[t] += p.weight;
    }
    std::size_t best = 0;
    for (std::size_t t = 1; t < scores.size(); ++t) {
      if (scores[t] > scores[best]) best = t;
    }
    return best;
  }

  void update(std::size_t truth, std::size_t guess,
              const std::vector<std::string>& features) {
    ++instances_;
    if (truth == guess) return;
    for (const auto& f : features) {
      auto& row = params_[f];
      bump(row[truth], 1.0);
      bump(row[guess], -1.0);
    }
  }

  void tick() { ++instances_; }

  TaggerModel::Weights averaged() const {
    TaggerModel::Weights out;
    const double n = static_cast<double>(std::max<std::uint64_t>(instances_, 1));
    for (const auto& [feature, row] : params_) {
      TaggerModel::TagWeights tw;
      for (const auto& [t, p] : row) {
        const double total =
            p.total + static_cast<double>(instances_ - p.stamp) * p.weight;
        const double avg = total / n;
        if (avg != 0.0) tw[tags_[t]] = avg;
      }
      if (!tw.empty()) out.emplace(feature, std::move(tw));
    }
    return out;
  }

 private:
  struct Param {
    double weight = 0.0;
    double total = 0.0;
    std::uint64_t stamp = 0;
  };

  void bump(Param& p, double delta) {
    p.total += static_cast<double>(instances_ - p.stamp) * p.weight;
    p.stamp = instances_;
    p.weight += delta;
  }

  std::vector<std::string> tags_;
  std::unordered_map<std::string, std::map<std::size_t, Param>> params_;
  std::uint64_t instances_ = 0;
};

}  // namespace detail

// Trains on `corpus` for `iterations` passes, reshuffling the sentence order
// before each pass with a generator seeded by `seed`.
inline TaggerModel train_tagger(std::span<const TaggedSentence> corpus,
                                int iterations, std::uint64_t seed) {
  if (corpus.empty()) throw EmptyCorpus();
  if (iterations < 1) throw InvalidArgument("iterations must be >= 1");

  std::set<std::string> tagset{std::string(kHyphenTag)};
  for (const auto& sentence : corpus) {
    for (const auto& w : sentence) {
      if (w.penn.empty()) throw InvalidArgument("training token without tag");
      tagset.insert(w.penn);
    }
  }
  std::vector<std::string> tags(tagset.begin(), tagset.end());
  std::unordered_map<std::string, std::size_t> tag_index;
  for (std::size_t i = 0; i < tags.size(); ++i) tag_index[tags[i]] = i;

  // Fisher-Yates with our own bounded draw so the order does not depend on
  // the standard library's distribution implementation.
  std::mt19937_64 rng(seed);
  auto draw = [&rng](std::uint64_t bound) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = rng();
    } while (x >= limit);
    return x % bound;
  };

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  detail::PerceptronTrainer trainer(tags);
  for (int iter = 0; iter < iterations; ++iter) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[draw(i)]);
    }
    for (std::size_t s : order) {
      const auto& sentence = corpus[s];
      std::vector<std::string> raw, lower;
      raw.reserve(sentence.size());
      lower.reserve(sentence.size());
      for (const auto& w : sentence) {
        raw.push_back(w.word);
        lower.push_back(ascii_lower(w.word));
      }
      std::string prev(detail::kStart1), prev2(detail::kStart2);
      for (std::size_t i = 0; i < sentence.size(); ++i) {
        std::string guess;
        if (raw[i] == "-") {
          guess = kHyphenTag;
          trainer.tick();
        } else {
          auto features =
              detail::tagger_features(lower, i, prev, prev2, raw[i]);
          const std::size_t g = trainer.predict(features);
          trainer.update(tag_index.at(sentence[i].penn), g, features);
          guess = tags[g];
        }
        if (detail::is_sentence_final(raw[i])) {
          prev = detail::kStart1;
          prev2 = detail::kStart2;
        } else {
          prev2 = std::move(prev);
          prev = std::move(guess);
        }
      }
    }
  }
  return TaggerModel(trainer.averaged(), std::move(tagset), iterations, seed);
}

// Fraction of tokens whose predicted tag equals the gold tag.
inline double tagging_accuracy(const TaggerModel& model,
                               std::span<const TaggedSentence> corpus) {
  std::size_t total = 0, correct = 0;
  for (const auto& sentence : corpus) {
    std::vector<std::string> words;
    words.reserve(sentence.size());
    for (const auto& w : sentence) words.push_back(w.word);
    const auto predicted = model.tag_words(words);
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      ++total;
      if (predicted[i] == sentence[i].penn) ++correct;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / total;
}

// Tags a token sequence as one document. Hyphen tokens always get HYPH.
inline TaggedDocument tag(std::vector<Token> tokens, const TaggerModel& model,
                          std::string doc_id = {}, std::string text = {}) {
  std::vector<std::string> words;
  words.reserve(tokens.size());
  for (const auto& t : tokens) words.push_back(t.surface);
  auto penn = model.tag_words(words);

  TaggedDocument doc;
  doc.doc_id = std::move(doc_id);
  doc.text = std::move(text);
  doc.tokens.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    PosTag t(tokens[i].is_hyphen ? std::string(kHyphenTag) : std::move(penn[i]));
    doc.tokens.push_back({std::move(tokens[i]), std::move(t)});
  }
  return doc;
}

// tokenize + tag.
inline TaggedDocument tag_text(std::string doc_id, std::string text,
                               const TaggerModel& model) {
  auto tokens = tokenize(text);
  return tag(std::move(tokens), model, std::move(doc_id), std::move(text));
}

}  // namespace patternrank

#endif  // PATTERNRANK_TAGGER_HPP_
