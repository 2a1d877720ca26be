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

// patternrank: batch keyphrase extraction and evaluation.
//
//   patternrank train-tagger --corpus train.conllu --out tagger.json
//   patternrank extract --tagger-model tagger.json --backend reference:256:0
//       --input docs.jsonl
//   patternrank eval --tagger-model tagger.json --backend http:localhost:8000
//       --corpus Inspec/ --format table

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "patternrank/pipeline.hpp"

namespace {

using patternrank::ConfigError;
using patternrank::RunConfig;

std::vector<std::size_t> parse_size_list(const std::string& s, const char* flag) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    const std::string item = patternrank::detail::trim(s.substr(pos, comma - pos));
    std::size_t used = 0;
    try {
      if (item.empty() || item.front() == '-') throw std::invalid_argument(item);
      out.push_back(std::stoull(item, &used));
    } catch (const std::exception&) {
      throw ConfigError(std::string(flag) + ": '" + s + "' is not a list of positive integers");
    }
    if (used != item.size()) {
      throw ConfigError(std::string(flag) + ": '" + s + "' is not a list of positive integers");
    }
    pos = comma + 1;
  }
  return out;
}

// Flag values as given on the command line; unset options leave the config
// (defaults or --config file) untouched.
struct Flags {
  std::string config_path;
  std::string save_config;
  std::string extractor;
  std::string pattern;
  std::size_t top_n = 0;
  std::string n_values;
  std::string backend;
  std::string tagger_model;
  bool conllu = false;
  std::size_t window = 0;
  double damping = 0;
  double tol = 0;
  std::size_t max_iter = 0;
  std::string ngram_range;
  std::string stopwords;
  std::size_t threads = 0;
  std::size_t batch_size = 0;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON run configuration to start from");
  cmd->add_option("--save-config", f.save_config,
                  "Write the effective configuration to this path");
  cmd->add_option("--extractor", f.extractor,
                  "patternrank_pos (default), patternrank_np, singlerank, ngram");
  cmd->add_option("--pattern", f.pattern, "Override the candidate POS pattern");
  cmd->add_option("--top-n", f.top_n, "Keyphrases per document (default 20)");
  cmd->add_option("--n-values", f.n_values, "Evaluation cutoffs (default 5,10,20)");
  cmd->add_option("--backend", f.backend,
                  "http:URL | stdio:CMD | precomputed:PATH | reference:DIM:SEED");
  cmd->add_option("--tagger-model", f.tagger_model, "Trained tagger model (JSON)");
  cmd->add_flag("--conllu", f.conllu, "Input is pre-tagged CoNLL-U");
  cmd->add_option("--window", f.window, "SingleRank co-occurrence window (default 10)");
  cmd->add_option("--damping", f.damping, "SingleRank damping (default 0.85)");
  cmd->add_option("--tol", f.tol, "SingleRank convergence tolerance (default 1e-6)");
  cmd->add_option("--max-iter", f.max_iter, "SingleRank iteration cap (default 100)");
  cmd->add_option("--ngram-range", f.ngram_range, "n-gram mode range MIN,MAX (default 1,3)");
  cmd->add_option("--stopwords", f.stopwords, "Stopword file for n-gram mode");
  cmd->add_option("--threads", f.threads, "Worker threads over documents (default 1)");
  cmd->add_option("--batch-size", f.batch_size, "Texts per embedding request (default 64)");
}

RunConfig build_config(const CLI::App* cmd, const Flags& f) {
  RunConfig c;
  if (cmd->count("--config")) {
    nlohmann::json j = nlohmann::json::parse(
        patternrank::detail::read_file(f.config_path), nullptr, false);
    if (j.is_discarded()) throw ConfigError("config is not JSON: " + f.config_path);
    c = RunConfig::from_json(j);
  }
  if (cmd->count("--extractor")) c.extractor = patternrank::extractor_from_name(f.extractor);
  if (cmd->count("--pattern")) c.pattern = f.pattern;
  if (cmd->count("--top-n")) c.top_n = f.top_n;
  if (cmd->count("--n-values")) c.n_values = parse_size_list(f.n_values, "--n-values");
  if (cmd->count("--backend")) {
    c.backend = patternrank::parse_backend_spec(f.backend);
  } else if (!c.backend) {
    if (const char* env = std::getenv("PATTERNRANK_BACKEND"); env && *env) {
      c.backend = patternrank::parse_backend_spec(env);
    }
  }
  if (cmd->count("--tagger-model")) c.tagger_model = f.tagger_model;
  if (cmd->count("--conllu")) c.conllu = f.conllu;
  if (cmd->count("--window")) c.singlerank.window = f.window;
  if (cmd->count("--damping")) c.singlerank.damping = f.damping;
  if (cmd->count("--tol")) c.singlerank.tol = f.tol;
  if (cmd->count("--max-iter")) c.singlerank.max_iter = f.max_iter;
  if (cmd->count("--ngram-range")) {
    auto r = parse_size_list(f.ngram_range, "--ngram-range");
    if (r.size() != 2) throw ConfigError("--ngram-range expects MIN,MAX");
    c.ngram_min = r[0];
    c.ngram_max = r[1];
  }
  if (cmd->count("--stopwords")) c.stopwords = f.stopwords;
  if (cmd->count("--threads")) c.threads = f.threads;
  if (cmd->count("--batch-size")) c.batch_size = f.batch_size;
  if (cmd->count("--save-config")) {
    std::ofstream out(f.save_config, std::ios::trunc);
    out << c.to_json().dump(2) << "\n";
    if (!out) throw patternrank::IoError("cannot write " + f.save_config);
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised keyphrase extraction with part-of-speech patterns "
               "and embedding-similarity ranking"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train-tagger", "Train the POS tagger on CoNLL-U");
  std::string corpus_path, out_path;
  int iterations = 5;
  std::uint64_t seed = 0;
  train->add_option("--corpus", corpus_path, "CoNLL-U training corpus")->required();
  train->add_option("--out", out_path, "Model output path")->required();
  train->add_option("--iterations", iterations, "Training passes (default 5)");
  train->add_option("--seed", seed, "Shuffle seed (default 0)");

  Flags extract_flags;
  auto* extract = app.add_subcommand("extract", "Extract keyphrases to JSONL");
  std::string input_path, output_path;
  add_run_flags(extract, extract_flags);
  extract->add_option("--input", input_path, "Text file, JSONL corpus, or CoNLL-U")
      ->required();
  extract->add_option("--output", output_path, "Output file (default stdout)");

  Flags eval_flags;
  auto* eval = app.add_subcommand("eval", "Evaluate against a gold corpus");
  std::string eval_corpus, format = "table", tagged_path;
  add_run_flags(eval, eval_flags);
  eval->add_option("--corpus", eval_corpus, "Inspec directory or JSONL corpus")
      ->required();
  eval->add_option("--format", format, "table | json | csv");
  eval->add_option("--tagged", tagged_path, "CoNLL-U tags for the corpus (with --conllu)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return patternrank::kExitConfig;
  }

  if (*train) {
    return patternrank::cmd_train_tagger(corpus_path, iterations, seed, out_path,
                                         std::cout, std::cerr);
  }

  const bool is_extract = static_cast<bool>(*extract);
  CLI::App* cmd = is_extract ? extract : eval;
  const Flags& flags = is_extract ? extract_flags : eval_flags;
  RunConfig config;
  try {
    config = build_config(cmd, flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return patternrank::exit_code_for(std::current_exception()) == patternrank::kExitIo
               ? patternrank::kExitIo
               : patternrank::kExitConfig;
  }

  if (is_extract) {
    if (output_path.empty()) {
      return patternrank::cmd_extract(config, input_path, std::cout, std::cerr);
    }
    std::ofstream out(output_path, std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "error: cannot write " << output_path << "\n";
      return patternrank::kExitIo;
    }
    return patternrank::cmd_extract(config, input_path, out, std::cerr);
  }

  patternrank::ReportFormat fmt;
  try {
    fmt = patternrank::report_format_from_name(format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return patternrank::kExitConfig;
  }
  std::optional<std::string> tagged;
  if (!tagged_path.empty()) tagged = tagged_path;
  return patternrank::cmd_eval(config, eval_corpus, fmt, std::cout, std::cerr, tagged);
}
