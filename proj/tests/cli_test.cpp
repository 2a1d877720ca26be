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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "patternrank/pipeline.hpp"
#include "testing.hpp"

namespace patternrank {
namespace {

using testing::data_path;
using testing::TempDir;

// Writes the fixture tagger next to the test's scratch files.
std::string write_model(const TempDir& dir) {
  const std::string path = dir.file("tagger.json");
  testing::spit(path, testing::fixture_tagger().serialize());
  return path;
}

RunConfig base_config(const std::string& model) {
  RunConfig c;
  c.tagger_model = model;
  c.backend = parse_backend_spec("reference:64:1");
  return c;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome extract(const RunConfig& c, const std::string& input) {
  std::ostringstream out, err;
  const int code = cmd_extract(c, input, out, err);
  return {code, out.str(), err.str()};
}

Outcome eval(const RunConfig& c, const std::string& corpus, ReportFormat f = ReportFormat::kJson) {
  std::ostringstream out, err;
  const int code = cmd_eval(c, corpus, f, out, err);
  return {code, out.str(), err.str()};
}

// Runs the installed binary through the shell; returns its exit status.
int run_cli(const std::string& args, const std::string& stdout_path,
            const std::string& env = {}) {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" PATTERNRANK_CLI_PATH "' " +
                          args + " > '" + stdout_path + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---- train-tagger -----------------------------------------------------------

TEST(TrainTagger, WritesLoadableModel) {
  TempDir dir;
  std::ostringstream out, err;
  const std::string model = dir.file("m.json");
  ASSERT_EQ(cmd_train_tagger(data_path("train20.conllu"), 3, 1, model, out, err), kExitOk)
      << err.str();
  EXPECT_NE(out.str().find("20 sentences"), std::string::npos);
  const auto m = TaggerModel::deserialize(testing::slurp(model));
  EXPECT_EQ(m.iterations_trained(), 3);
}

TEST(TrainTagger, MissingOrMalformedCorpusIsConfigError) {
  TempDir dir;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_train_tagger(dir.file("nope.conllu"), 1, 0, dir.file("m"), out, err),
            kExitConfig);
  testing::spit(dir.file("bad.conllu"), "1\tword\tNN\n");
  EXPECT_EQ(cmd_train_tagger(dir.file("bad.conllu"), 1, 0, dir.file("m"), out, err),
            kExitConfig);
}

TEST(TrainTagger, FixedSeedIsReproducible) {
  TempDir dir;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_train_tagger(data_path("train20.conllu"), 4, 9, dir.file("a"), out, err), 0);
  ASSERT_EQ(cmd_train_tagger(data_path("train20.conllu"), 4, 9, dir.file("b"), out, err), 0);
  EXPECT_EQ(testing::slurp(dir.file("a")), testing::slurp(dir.file("b")));
}

// ---- extract ----------------------------------------------------------------

TEST(Extract, EmptyDocumentGivesEmptyList) {
  TempDir dir;
  testing::spit(dir.file("blank.txt"), "");
  const Outcome r = extract(base_config(write_model(dir)), dir.file("blank.txt"));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "{\"id\":\"blank\",\"keyphrases\":[]}\n");
}

TEST(Extract, JsonlOneLinePerDocumentInInputOrder) {
  TempDir dir;
  const Outcome r = extract(base_config(write_model(dir)), data_path("abstracts.jsonl"));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> ids;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    ids.push_back(j.at("id"));
    const auto& kp = j.at("keyphrases");
    EXPECT_LE(kp.size(), 20u);
    for (std::size_t i = 0; i < kp.size(); ++i) {
      EXPECT_EQ(kp[i].at("rank"), i + 1);
      if (i) {
        EXPECT_GE(kp[i - 1].at("score").get<double>(), kp[i].at("score").get<double>());
      }
    }
  }
  EXPECT_EQ(ids, (std::vector<std::string>{"d1", "d2", "d3", "d4", "d5", "d6"}));
}

TEST(Extract, DeterministicAcrossRunsAndThreads) {
  TempDir dir;
  RunConfig c = base_config(write_model(dir));
  const Outcome first = extract(c, data_path("abstracts.jsonl"));
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_EQ(extract(c, data_path("abstracts.jsonl")).out, first.out);
  c.threads = 8;
  c.batch_size = 3;
  EXPECT_EQ(extract(c, data_path("abstracts.jsonl")).out, first.out);
}

TEST(Extract, SingleRankNeedsNoBackend) {
  TempDir dir;
  RunConfig c = base_config(write_model(dir));
  c.extractor = ExtractorKind::kSingleRank;
  c.backend.reset();
  const Outcome r = extract(c, data_path("abstracts.jsonl"));
  EXPECT_EQ(r.code, kExitOk) << r.err;
}

TEST(Extract, PretaggedConllu) {
  TempDir dir;
  testing::spit(dir.file("in.conllu"),
                "# newdoc id = x\n"
                "1\tfuzzy\tfuzzy\tADJ\tJJ\t_\t_\t_\t_\t_\n"
                "2\tlogic\tlogic\tNOUN\tNN\t_\t_\t_\t_\t_\n\n");
  RunConfig c;
  c.conllu = true;
  c.backend = parse_backend_spec("reference:32:0");
  const Outcome r = extract(c, dir.file("in.conllu"));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("id"), "x");
  ASSERT_EQ(j.at("keyphrases").size(), 1u);
  EXPECT_EQ(j.at("keyphrases")[0].at("phrase"), "fuzzy logic");
}

TEST(Extract, UnreachableBackendExitsThree) {
  TempDir dir;
  RunConfig c = base_config(write_model(dir));
  c.backend = parse_backend_spec("http://127.0.0.1:1");
  const Outcome r = extract(c, data_path("abstracts.jsonl"));
  EXPECT_EQ(r.code, kExitBackend);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(Extract, ConfigErrorsExitTwo) {
  TempDir dir;
  const std::string model = write_model(dir);
  RunConfig no_backend = base_config(model);
  no_backend.backend.reset();
  EXPECT_EQ(extract(no_backend, data_path("abstracts.jsonl")).code, kExitConfig);

  RunConfig bad_pattern = base_config(model);
  bad_pattern.pattern = "{NOUN";
  EXPECT_EQ(extract(bad_pattern, data_path("abstracts.jsonl")).code, kExitConfig);

  RunConfig both = base_config(model);
  both.conllu = true;
  EXPECT_EQ(extract(both, data_path("abstracts.jsonl")).code, kExitConfig);
}

TEST(Extract, IoErrorsExitFour) {
  TempDir dir;
  const std::string model = write_model(dir);
  EXPECT_EQ(extract(base_config(model), dir.file("missing.jsonl")).code, kExitIo);
  testing::spit(dir.file("bad.jsonl"), "{\"id\":\"a\"}\n");
  EXPECT_EQ(extract(base_config(model), dir.file("bad.jsonl")).code, kExitIo);
  testing::spit(dir.file("model.json"), "not a model");
  EXPECT_EQ(extract(base_config(dir.file("model.json")), data_path("abstracts.jsonl")).code,
            kExitIo);
}

// ---- eval -------------------------------------------------------------------

TEST(Eval, NgramFixtureMatchesHandCounts) {
  TempDir dir;
  RunConfig c = base_config(write_model(dir));
  c.extractor = ExtractorKind::kNgram;
  c.n_values = {5};
  const Outcome r = eval(c, data_path("two_docs.jsonl"));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const EvalReport rep = report_from_json(nlohmann::json::parse(r.out));
  const PRF exact = rep.macro.at({Regime::kExact, 5});
  const PRF partial = rep.macro.at({Regime::kPartial, 5});
  const PRF avg = rep.macro.at({Regime::kAverage, 5});
  EXPECT_NEAR(exact.precision, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(exact.recall, 0.75, 1e-12);
  EXPECT_NEAR(exact.f1, 0.45, 1e-12);
  EXPECT_NEAR(partial.precision, 1.0, 1e-12);
  EXPECT_NEAR(partial.recall, 5.0 / 6.0, 1e-12);
  EXPECT_NEAR(partial.f1, 0.9, 1e-12);
  EXPECT_NEAR(avg.precision, (1.0 / 3.0 + 1.0) / 2, 1e-12);
  EXPECT_NEAR(avg.f1, (0.45 + 0.9) / 2, 1e-12);
  EXPECT_EQ(rep.per_document.at("a").at({Regime::kExact, 5}).f1, 0.4);
}

TEST(Eval, DefaultCutoffsAndInspecDirectory) {
  TempDir dir;
  const Outcome r = eval(base_config(write_model(dir)), data_path("inspec"));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const EvalReport rep = report_from_json(nlohmann::json::parse(r.out));
  EXPECT_EQ(rep.n_values, (std::vector<std::size_t>{5, 10, 20}));
  EXPECT_EQ(rep.doc_order, (std::vector<std::string>{"2", "sub/1"}));
  EXPECT_EQ(rep.extractor_name, "patternrank_pos");
}

TEST(Eval, TopNBelowLargestCutoffIsConfigError) {
  TempDir dir;
  RunConfig c = base_config(write_model(dir));
  c.top_n = 10;
  EXPECT_EQ(eval(c, data_path("two_docs.jsonl")).code, kExitConfig);
}

TEST(Eval, EmptyTextDocumentScoresZero) {
  TempDir dir;
  const Outcome r = eval(base_config(write_model(dir)), data_path("abstracts.jsonl"));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const EvalReport rep = report_from_json(nlohmann::json::parse(r.out));
  EXPECT_EQ(rep.per_document.at("d3").at({Regime::kExact, 5}), (PRF{0, 0, 0}));
}

TEST(Eval, MissingGoldIsIoError) {
  TempDir dir;
  testing::spit(dir.file("c/1.abstr"), "text");
  EXPECT_EQ(eval(base_config(write_model(dir)), dir.file("c")).code, kExitIo);
}

// ---- config -----------------------------------------------------------------

TEST(Config, JsonRoundTrip) {
  RunConfig c;
  c.extractor = ExtractorKind::kNgram;
  c.pattern = "{NOUN}+";
  c.top_n = 7;
  c.n_values = {1, 7};
  c.backend = parse_backend_spec("stdio:python3 x.py");
  c.tagger_model = "m.json";
  c.singlerank.window = 4;
  c.singlerank.damping = 0.5;
  c.ngram_min = 2;
  c.ngram_max = 2;
  c.stopwords = "stop.txt";
  c.threads = 3;
  c.batch_size = 5;
  EXPECT_EQ(RunConfig::from_json(c.to_json()), c);
  EXPECT_EQ(RunConfig::from_json(nlohmann::json::object()), RunConfig{});
  EXPECT_THROW(RunConfig::from_json({{"top_n", "many"}}), ConfigError);
}

TEST(Config, StopwordsSkipCommentsAndBlanks) {
  EXPECT_EQ(parse_stopwords("# header\nThe\n\n  of \n"), (std::set<std::string>{"the", "of"}));
}

TEST(ExitCode, Mapping) {
  auto code = [](auto e) { return exit_code_for(std::make_exception_ptr(e)); };
  EXPECT_EQ(code(ConfigError("x")), 2);
  EXPECT_EQ(code(ParseError(0, "x")), 2);
  EXPECT_EQ(code(BackendFailure(BackendFailure::Cause::kStatus, "x")), 3);
  EXPECT_EQ(code(IoError("x")), 4);
  EXPECT_EQ(code(MalformedLine(1, "x")), 4);
  EXPECT_EQ(code(DocumentError("d", "x", std::make_exception_ptr(IoError("y")))), 4);
}

// ---- binary -----------------------------------------------------------------

TEST(Binary, TrainExtractEvalEndToEnd) {
  TempDir dir;
  const std::string model = dir.file("m.json");
  ASSERT_EQ(run_cli("train-tagger --corpus '" + data_path("train20.conllu") + "' --out '" +
                        model + "' --iterations 2",
                    dir.file("train.out")),
            0);
  const std::string common = " --tagger-model '" + model + "' --backend reference:32:0";
  ASSERT_EQ(run_cli("extract --input '" + data_path("abstracts.jsonl") + "'" + common,
                    dir.file("a.jsonl")),
            0);
  ASSERT_EQ(run_cli("extract --input '" + data_path("abstracts.jsonl") + "' --threads 4" +
                        common + " --output '" + dir.file("b.jsonl") + "'",
                    dir.file("b.stdout")),
            0);
  EXPECT_EQ(testing::slurp(dir.file("a.jsonl")), testing::slurp(dir.file("b.jsonl")));

  ASSERT_EQ(run_cli("eval --corpus '" + data_path("two_docs.jsonl") + "' --format csv" +
                        " --extractor ngram --n-values 5" + common,
                    dir.file("r.csv")),
            0);
  const std::string csv = testing::slurp(dir.file("r.csv"));
  EXPECT_NE(csv.find("exact,5,0.333333,0.750000,0.450000"), std::string::npos) << csv;
  EXPECT_NE(csv.find("partial,5,1.000000,0.833333,0.900000"), std::string::npos) << csv;
}

TEST(Binary, SaveConfigThenReuse) {
  TempDir dir;
  const std::string model = write_model(dir);
  const std::string input = " --input '" + data_path("abstracts.jsonl") + "'";
  ASSERT_EQ(run_cli("extract" + input + " --tagger-model '" + model +
                        "' --backend reference:32:5 --top-n 3 --save-config '" +
                        dir.file("cfg.json") + "'",
                    dir.file("a")),
            0);
  const auto saved = RunConfig::from_json(nlohmann::json::parse(testing::slurp(dir.file("cfg.json"))));
  EXPECT_EQ(saved.top_n, 3u);
  ASSERT_EQ(run_cli("extract" + input + " --config '" + dir.file("cfg.json") + "'",
                    dir.file("b")),
            0);
  EXPECT_EQ(testing::slurp(dir.file("a")), testing::slurp(dir.file("b")));
}

TEST(Binary, BackendFromEnvironment) {
  TempDir dir;
  const std::string model = write_model(dir);
  const std::string args = "extract --input '" + data_path("abstracts.jsonl") +
                           "' --tagger-model '" + model + "'";
  EXPECT_EQ(run_cli(args, dir.file("none"), "env -u PATTERNRANK_BACKEND"), 2);
  ASSERT_EQ(run_cli(args, dir.file("env"), "PATTERNRANK_BACKEND=reference:32:0"), 0);
  ASSERT_EQ(run_cli(args + " --backend reference:32:0", dir.file("flag")), 0);
  EXPECT_EQ(testing::slurp(dir.file("env")), testing::slurp(dir.file("flag")));
}

TEST(Binary, ExitCodes) {
  TempDir dir;
  const std::string model = write_model(dir);
  EXPECT_EQ(run_cli("extract --input x", dir.file("o")), 2);  // no backend, no tagger
  EXPECT_EQ(run_cli("bogus", dir.file("o")), 2);
  EXPECT_EQ(run_cli("extract --extractor nope --input x --tagger-model '" + model +
                        "' --backend reference:32:0",
                    dir.file("o")),
            2);
  EXPECT_EQ(run_cli("extract --input '" + dir.file("missing.txt") + "' --tagger-model '" +
                        model + "' --backend reference:32:0",
                    dir.file("o")),
            4);
  EXPECT_EQ(run_cli("extract --input '" + data_path("abstracts.jsonl") + "' --tagger-model '" +
                        model + "' --backend http://127.0.0.1:1",
                    dir.file("o")),
            3);
}

}  // namespace
}  // namespace patternrank
