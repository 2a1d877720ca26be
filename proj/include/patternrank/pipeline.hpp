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

// End-to-end wiring used by the command-line tool: run configuration,
// extractor construction, and the train-tagger / extract / eval commands.

#ifndef PATTERNRANK_PIPELINE_HPP_
#define PATTERNRANK_PIPELINE_HPP_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "patternrank/backends.hpp"
#include "patternrank/candidates.hpp"
#include "patternrank/conllu.hpp"
#include "patternrank/error.hpp"
#include "patternrank/eval.hpp"
#include "patternrank/matcher.hpp"
#include "patternrank/parallel.hpp"
#include "patternrank/pattern.hpp"
#include "patternrank/ranker.hpp"
#include "patternrank/singlerank.hpp"
#include "patternrank/tagger.hpp"

namespace patternrank {

enum class ExtractorKind { kPatternRankPos, kPatternRankNp, kSingleRank, kNgram };

inline std::string_view extractor_name(ExtractorKind k) {
  switch (k) {
    case ExtractorKind::kPatternRankPos: return "patternrank_pos";
    case ExtractorKind::kPatternRankNp: return "patternrank_np";
    case ExtractorKind::kSingleRank: return "singlerank";
    case ExtractorKind::kNgram: return "ngram";
  }
  return "patternrank_pos";
}

inline ExtractorKind extractor_from_name(std::string_view s) {
  for (auto k : {ExtractorKind::kPatternRankPos, ExtractorKind::kPatternRankNp,
                 ExtractorKind::kSingleRank, ExtractorKind::kNgram}) {
    if (extractor_name(k) == s) return k;
  }
  throw ConfigError("unknown extractor '" + std::string(s) +
                    "' (expected patternrank_pos, patternrank_np, singlerank "
                    "or ngram)");
}

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBackend = 3;
inline constexpr int kExitIo = 4;

struct RunConfig {
  ExtractorKind extractor = ExtractorKind::kPatternRankPos;
  std::optional<std::string> pattern;
  std::size_t top_n = 20;
  std::vector<std::size_t> n_values{5, 10, 20};
  std::optional<BackendSpec> backend;
  std::optional<std::string> tagger_model;
  bool conllu = false;
  SingleRankParams singlerank;
  std::size_t ngram_min = 1;
  std::size_t ngram_max = 3;
  std::optional<std::string> stopwords;
  std::size_t threads = 1;
  std::size_t batch_size = 64;

  bool needs_backend() const { return extractor != ExtractorKind::kSingleRank; }

  // Checks the invariants that hold for every command.
  void validate() const {
    if (needs_backend() && !backend) {
      throw ConfigError("no embedding backend: pass --backend or set "
                        "PATTERNRANK_BACKEND");
    }
    if (tagger_model && conllu) {
      throw ConfigError("--tagger-model and --conllu are mutually exclusive");
    }
    if (!tagger_model && !conllu) {
      throw ConfigError("a tagger source is required: --tagger-model PATH or --conllu");
    }
    if (top_n < 1) throw ConfigError("--top-n must be >= 1");
    if (n_values.empty()) throw ConfigError("--n-values must not be empty");
    for (auto n : n_values) {
      if (n < 1) throw ConfigError("every --n-values entry must be >= 1");
    }
    if (ngram_min < 1 || ngram_min > ngram_max) {
      throw ConfigError("--ngram-range requires 1 <= MIN <= MAX");
    }
    if (singlerank.window < 2) throw ConfigError("--window must be >= 2");
    if (!(singlerank.damping > 0.0 && singlerank.damping < 1.0)) {
      throw ConfigError("--damping must be in (0, 1)");
    }
    if (!(singlerank.tol > 0.0)) throw ConfigError("--tol must be > 0");
    if (threads < 1) throw ConfigError("--threads must be >= 1");
    if (batch_size < 1) throw ConfigError("--batch-size must be >= 1");
    if (pattern) parse_pattern(*pattern);  // surfaces ParseError early
  }

  // Evaluation additionally needs top_n to cover the largest N.
  void validate_for_eval() const {
    validate();
    const auto max_n = *std::max_element(n_values.begin(), n_values.end());
    if (top_n < max_n) {
      throw ConfigError("--top-n (" + std::to_string(top_n) +
                        ") must be >= max(--n-values) (" + std::to_string(max_n) +
                        ")");
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["extractor"] = extractor_name(extractor);
    j["pattern"] = pattern ? nlohmann::json(*pattern) : nlohmann::json(nullptr);
    j["top_n"] = top_n;
    j["n_values"] = n_values;
    j["backend"] =
        backend ? nlohmann::json(backend->to_string()) : nlohmann::json(nullptr);
    j["tagger_model"] =
        tagger_model ? nlohmann::json(*tagger_model) : nlohmann::json(nullptr);
    j["conllu"] = conllu;
    j["window"] = singlerank.window;
    j["damping"] = singlerank.damping;
    j["tol"] = singlerank.tol;
    j["max_iter"] = singlerank.max_iter;
    j["ngram_min"] = ngram_min;
    j["ngram_max"] = ngram_max;
    j["stopwords"] = stopwords ? nlohmann::json(*stopwords) : nlohmann::json(nullptr);
    j["threads"] = threads;
    j["batch_size"] = batch_size;
    return j;
  }

  // Missing keys keep their defaults.
  static RunConfig from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
      auto opt_string = [&](const char* key) -> std::optional<std::string> {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return std::nullopt;
        return it->get<std::string>();
      };
      if (auto e = opt_string("extractor")) c.extractor = extractor_from_name(*e);
      c.pattern = opt_string("pattern");
      c.top_n = j.value("top_n", c.top_n);
      c.n_values = j.value("n_values", c.n_values);
      if (auto b = opt_string("backend")) c.backend = parse_backend_spec(*b);
      c.tagger_model = opt_string("tagger_model");
      c.conllu = j.value("conllu", c.conllu);
      c.singlerank.window = j.value("window", c.singlerank.window);
      c.singlerank.damping = j.value("damping", c.singlerank.damping);
      c.singlerank.tol = j.value("tol", c.singlerank.tol);
      c.singlerank.max_iter = j.value("max_iter", c.singlerank.max_iter);
      c.ngram_min = j.value("ngram_min", c.ngram_min);
      c.ngram_max = j.value("ngram_max", c.ngram_max);
      c.stopwords = opt_string("stopwords");
      c.threads = j.value("threads", c.threads);
      c.batch_size = j.value("batch_size", c.batch_size);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad config: ") + e.what());
    }
    return c;
  }

  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.to_json() == b.to_json();
  }
};

// One word per line; blank lines and lines starting with '#' are skipped.
inline std::set<std::string> parse_stopwords(std::string_view content) {
  std::set<std::string> out;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    std::string w = ascii_lower(detail::trim(line));
    if (w.empty() || w.front() == '#') continue;
    out.insert(std::move(w));
  }
  return out;
}

// A configured extractor. Thread-safe: documents may be processed
// concurrently.
class KeyphrasePipeline {
 public:
  KeyphrasePipeline(RunConfig config, std::shared_ptr<const TaggerModel> tagger,
                    std::shared_ptr<EmbeddingBackend> backend,
                    std::set<std::string> stopwords = {})
      : config_(std::move(config)),
        tagger_(std::move(tagger)),
        backend_(std::move(backend)),
        stopwords_(std::move(stopwords)),
        matcher_(build_matcher(config_)) {
    if (config_.needs_backend() && !backend_) {
      throw ConfigError("extractor " + std::string(extractor_name(config_.extractor)) +
                        " needs an embedding backend");
    }
  }

  const RunConfig& config() const { return config_; }

  TaggedDocument tag_document(std::string doc_id, std::string text) const {
    if (!tagger_) throw ConfigError("no tagger model loaded");
    return tag_text(std::move(doc_id), std::move(text), *tagger_);
  }

  std::vector<Candidate> candidates(const TaggedDocument& doc) const {
    if (config_.extractor == ExtractorKind::kNgram) {
      return select_ngrams(doc, config_.ngram_min, config_.ngram_max, stopwords_);
    }
    return extract_candidates(doc, matcher_);
  }

  // Ranked keyphrases, best first, at most n of them.
  std::vector<RankedKeyphrase> extract(const TaggedDocument& doc,
                                       std::size_t n) const {
    auto cands = candidates(doc);
    std::vector<RankedKeyphrase> ranked;
    if (config_.extractor == ExtractorKind::kSingleRank) {
      const auto graph = build_graph(doc, config_.singlerank.window);
      if (!graph.empty()) {
        ranked = score_candidates(cands, weighted_pagerank(graph, config_.singlerank));
      } else {
        ranked = score_candidates(cands, {});
      }
    } else {
      RankOptions opts;
      opts.batch_size = config_.batch_size;
      ranked = rank_candidates(doc.text, cands, *backend_, opts);
    }
    return top_n(std::move(ranked), n);
  }

 private:
  static Matcher build_matcher(const RunConfig& c) {
    if (c.pattern) return compile(parse_pattern(*c.pattern));
    switch (c.extractor) {
      case ExtractorKind::kPatternRankPos:
        return compile(builtin_pattern(BuiltinPattern::kPatternRankPos));
      default:
        return compile(builtin_pattern(BuiltinPattern::kNounPhrase));
    }
  }

  RunConfig config_;
  std::shared_ptr<const TaggerModel> tagger_;
  std::shared_ptr<EmbeddingBackend> backend_;
  std::set<std::string> stopwords_;
  Matcher matcher_;
};

inline nlohmann::json keyphrases_to_json(const std::string& doc_id,
                                         const std::vector<RankedKeyphrase>& ranked) {
  nlohmann::json j;
  j["id"] = doc_id;
  j["keyphrases"] = nlohmann::json::array();
  for (const auto& r : ranked) {
    j["keyphrases"].push_back(
        {{"phrase", r.phrase()}, {"score", r.score}, {"rank", r.rank}});
  }
  return j;
}

// Maps a library exception to a CLI exit code.
inline int exit_code_for(const std::exception_ptr& ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const DocumentError& e) {
    return e.cause() ? exit_code_for(e.cause()) : kExitConfig;
  } catch (const BackendFailure&) {
    return kExitBackend;
  } catch (const DimensionMismatch&) {
    return kExitBackend;
  } catch (const ZeroVector&) {
    return kExitBackend;
  } catch (const IoError&) {
    return kExitIo;
  } catch (const MalformedLine&) {
    return kExitIo;
  } catch (const MalformedConllu&) {
    return kExitIo;
  } catch (const MissingGold&) {
    return kExitIo;
  } catch (const ModelFormatError&) {
    return kExitIo;
  } catch (...) {
    return kExitConfig;
  }
}

namespace detail {

inline std::shared_ptr<const TaggerModel> load_tagger(const RunConfig& c) {
  if (!c.tagger_model) return nullptr;
  return std::make_shared<const TaggerModel>(
      TaggerModel::deserialize(read_file(*c.tagger_model)));
}

inline std::shared_ptr<EmbeddingBackend> load_backend(const RunConfig& c) {
  if (!c.needs_backend() || !c.backend) return nullptr;
  return make_backend(*c.backend);
}

inline KeyphrasePipeline make_pipeline(const RunConfig& c) {
  std::set<std::string> stop;
  if (c.stopwords) stop = parse_stopwords(read_file(*c.stopwords));
  return KeyphrasePipeline(c, load_tagger(c), load_backend(c), std::move(stop));
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(std::current_exception());
  }
}

}  // namespace detail

// Trains a tagger on a CoNLL-U corpus and writes the model to out_path.
inline int cmd_train_tagger(const std::string& corpus_path, int iterations,
                            std::uint64_t seed, const std::string& out_path,
                            std::ostream& out, std::ostream& err) {
  std::string content;
  try {
    content = detail::read_file(corpus_path);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return detail::guarded(err, [&] {
    std::vector<TaggedSentence> sentences;
    try {
      sentences = load_conllu_sentences(content);
    } catch (const MalformedConllu& e) {
      err << "error: " << e.what() << "\n";
      return kExitConfig;
    }
    const TaggerModel model = train_tagger(sentences, iterations, seed);
    {
      std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
      if (!f) throw IoError("cannot write " + out_path);
      f << model.serialize();
      if (!f) throw IoError("error writing " + out_path);
    }
    std::size_t tokens = 0;
    for (const auto& s : sentences) tokens += s.size();
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", tagging_accuracy(model, sentences));
    out << "trained on " << sentences.size() << " sentences (" << tokens
        << " tokens), " << iterations << " iterations, seed " << seed
        << "; training accuracy " << buf << "\n";
    return kExitOk;
  });
}

// Extracts keyphrases from `input_path` and writes one JSON line per document.
// Input is CoNLL-U when config.conllu is set, JSONL ({"id","text"}) when the
// path ends in .jsonl, and a single plain-text document otherwise.
inline int cmd_extract(const RunConfig& config, const std::string& input_path,
                       std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    config.validate();
    const KeyphrasePipeline pipeline = detail::make_pipeline(config);

    std::vector<TaggedDocument> tagged;
    std::vector<GoldDocument> raw;
    const std::string content = detail::read_file(input_path);
    if (config.conllu) {
      tagged = load_conllu(content);
    } else if (std::filesystem::path(input_path).extension() == ".jsonl") {
      raw = parse_jsonl(content, /*require_gold=*/false);
    } else {
      raw.push_back({std::filesystem::path(input_path).stem().string(), content, {}});
    }
    const std::size_t n = config.conllu ? tagged.size() : raw.size();
    std::vector<std::string> lines(n);
    parallel_for(n, config.threads, [&](std::size_t i) {
      const std::string& id = config.conllu ? tagged[i].doc_id : raw[i].doc_id;
      try {
        TaggedDocument doc = config.conllu
                                 ? tagged[i]
                                 : pipeline.tag_document(raw[i].doc_id, raw[i].text);
        lines[i] = keyphrases_to_json(id, pipeline.extract(doc, config.top_n)).dump();
      } catch (const std::exception& e) {
        throw DocumentError(id, e.what(), std::current_exception());
      }
    });
    for (const auto& line : lines) out << line << "\n";
    out.flush();
    if (!out) throw IoError("error writing output");
    return kExitOk;
  });
}

// Evaluates against a gold corpus (an Inspec directory or a JSONL file) and
// prints the report. With config.conllu, tokens and tags come from
// `tagged_path` (CoNLL-U, documents matched by id) instead of the tagger.
inline int cmd_eval(const RunConfig& config, const std::string& corpus_path,
                    ReportFormat format, std::ostream& out, std::ostream& err,
                    const std::optional<std::string>& tagged_path = std::nullopt) {
  return detail::guarded(err, [&] {
    config.validate_for_eval();
    if (config.conllu && !tagged_path) {
      throw ConfigError("--conllu evaluation needs --tagged PATH");
    }
    const KeyphrasePipeline pipeline = detail::make_pipeline(config);
    const std::vector<GoldDocument> corpus =
        std::filesystem::is_directory(corpus_path) ? load_inspec(corpus_path)
                                                   : load_jsonl(corpus_path);
    std::map<std::string, TaggedDocument> pretagged;
    if (config.conllu) {
      for (auto& d : load_conllu(detail::read_file(*tagged_path))) {
        std::string id = d.doc_id;
        pretagged.emplace(std::move(id), std::move(d));
      }
      for (const auto& g : corpus) {
        if (!pretagged.contains(g.doc_id)) {
          throw ConfigError("document '" + g.doc_id + "' missing from " + *tagged_path);
        }
      }
    }
    Extractor extractor = [&](const GoldDocument& g, std::size_t max_n) {
      TaggedDocument doc;
      if (config.conllu) {
        doc = pretagged.at(g.doc_id);
        doc.text = g.text;
      } else {
        doc = pipeline.tag_document(g.doc_id, g.text);
      }
      std::vector<std::string> phrases;
      for (const auto& r : pipeline.extract(doc, max_n)) phrases.push_back(r.phrase());
      return phrases;
    };
    const EvalReport report =
        evaluate(corpus, extractor, config.n_values,
                 std::string(extractor_name(config.extractor)), config.threads);
    out << render_report(report, format);
    out.flush();
    return kExitOk;
  });
}

}  // namespace patternrank

#endif  // PATTERNRANK_PIPELINE_HPP_
