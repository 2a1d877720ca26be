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

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "patternrank/eval.hpp"
#include "testing.hpp"

namespace patternrank {
namespace {

const std::set<std::string> kGold{"neural networks", "fuzzy logic", "control"};
const std::vector<std::string> kExtracted{"neural networks", "grid computing"};

// ---- normalization ----------------------------------------------------------

TEST(Normalize, Phrase) {
  EXPECT_EQ(normalize_phrase("  Neural \t Networks\n"), "neural networks");
  EXPECT_EQ(normalize_phrase("State-of-the-Art"), "state-of-the-art");
  EXPECT_EQ(normalize_phrase("   "), "");
}

TEST(Normalize, RankedDedupKeepsFirst) {
  EXPECT_EQ(normalize_ranked({"B", "a", "b ", "", "A"}), (std::vector<std::string>{"b", "a"}));
}

// ---- load_inspec ------------------------------------------------------------

TEST(LoadInspec, OneAbstract) {
  testing::TempDir dir;
  testing::spit(dir.file("101.abstr"), "Some abstract text.");
  testing::spit(dir.file("101.uncontr"), "Neural Networks; control");
  const auto docs = load_inspec(dir.path().string());
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].doc_id, "101");
  EXPECT_EQ(docs[0].text, "Some abstract text.");
  EXPECT_EQ(docs[0].gold, (std::set<std::string>{"neural networks", "control"}));
}

TEST(LoadInspec, UnionOfControlledAndUncontrolled) {
  testing::TempDir dir;
  testing::spit(dir.file("a.abstr"), "x");
  testing::spit(dir.file("a.contr"), "Grid computing;\n  distributed\n\tsystems\n");
  testing::spit(dir.file("a.uncontr"), "grid computing; middleware\nscheduling");
  const auto docs = load_inspec(dir.path().string());
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].gold, (std::set<std::string>{"grid computing", "distributed systems",
                                                 "middleware", "scheduling"}));
}

TEST(LoadInspec, MissingGold) {
  testing::TempDir dir;
  testing::spit(dir.file("x/7.abstr"), "text");
  try {
    load_inspec(dir.path().string());
    FAIL();
  } catch (const MissingGold& e) {
    EXPECT_EQ(e.doc_id(), "x/7");
  }
}

TEST(LoadInspec, NotADirectory) {
  EXPECT_THROW(load_inspec("/nonexistent/inspec"), IoError);
}

TEST(LoadInspec, NestedSplitsSorted) {
  testing::TempDir dir;
  for (const char* id : {"test/2", "train/1", "test/1"}) {
    testing::spit(dir.file(std::string(id) + ".abstr"), id);
    testing::spit(dir.file(std::string(id) + ".uncontr"), "k");
  }
  const auto docs = load_inspec(dir.path().string());
  ASSERT_EQ(docs.size(), 3u);
  EXPECT_EQ(docs[0].doc_id, "test/1");
  EXPECT_EQ(docs[1].doc_id, "test/2");
  EXPECT_EQ(docs[2].doc_id, "train/1");
}

TEST(LoadInspec, FixtureDirectory) {
  const auto docs = load_inspec(testing::data_path("inspec"));
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].doc_id, "2");
  EXPECT_EQ(docs[0].gold, (std::set<std::string>{"grid computing", "systems"}));
  EXPECT_EQ(docs[1].doc_id, "sub/1");
}

// ---- load_jsonl -------------------------------------------------------------

TEST(LoadJsonl, OneLine) {
  const auto docs = parse_jsonl(R"({"id":"a","text":"t","keyphrases":["X  Y","x y"]})");
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].gold, (std::set<std::string>{"x y"}));
}

TEST(LoadJsonl, EmptyFile) { EXPECT_TRUE(parse_jsonl("").empty()); }

TEST(LoadJsonl, MissingTextReportsLine) {
  const std::string content =
      R"({"id":"a","text":"t","keyphrases":["k"]})" "\n"
      "\n"
      R"({"id":"b","keyphrases":["k"]})" "\n";
  try {
    parse_jsonl(content);
    FAIL();
  } catch (const MalformedLine& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadJsonl, OtherMalformations) {
  for (const char* line : {"{", "[1]", R"({"id":1,"text":"t","keyphrases":["k"]})",
                           R"({"id":"a","text":"t","keyphrases":"k"})",
                           R"({"id":"a","text":"t","keyphrases":[1]})",
                           R"({"id":"a","text":"t","keyphrases":["  "]})",
                           R"({"id":"a","text":"t"})"}) {
    EXPECT_THROW(parse_jsonl(line), MalformedLine) << line;
  }
}

TEST(LoadJsonl, GoldOptionalForExtraction) {
  const auto docs = parse_jsonl(R"({"id":"a","text":"t"})", /*require_gold=*/false);
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_TRUE(docs[0].gold.empty());
}

TEST(LoadJsonl, FixtureFile) {
  const auto docs = load_jsonl(testing::data_path("abstracts.jsonl"));
  EXPECT_EQ(docs.size(), 6u);
  EXPECT_THROW(load_jsonl("/nonexistent.jsonl"), IoError);
}

// ---- PRF --------------------------------------------------------------------

TEST(PrfExact, Perfect) {
  const PRF p = prf_exact({"control", "fuzzy logic", "neural networks"}, kGold);
  EXPECT_EQ(p, (PRF{1.0, 1.0, 1.0}));
}

TEST(PrfExact, HandCounted) {
  const PRF p = prf_exact(kExtracted, kGold);
  EXPECT_NEAR(p.precision, 0.5, 1e-12);
  EXPECT_NEAR(p.recall, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(p.f1, 0.4, 1e-12);
}

TEST(PrfExact, NothingExtracted) {
  EXPECT_EQ(prf_exact({}, kGold), (PRF{0.0, 0.0, 0.0}));
}

TEST(PrfExact, EmptyGold) {
  EXPECT_THROW(prf_exact(kExtracted, {}), EmptyGold);
  EXPECT_THROW(prf_partial(kExtracted, {}), EmptyGold);
}

TEST(PrfPartial, HandCounted) {
  const PRF p = prf_partial(kExtracted, kGold);
  EXPECT_NEAR(p.precision, 0.5, 1e-12);
  EXPECT_NEAR(p.recall, 0.4, 1e-12);
  EXPECT_NEAR(p.f1, 4.0 / 9.0, 1e-12);
}

TEST(PrfPartial, IdenticalUnigrams) {
  EXPECT_EQ(prf_partial({"logic fuzzy", "control networks neural"}, kGold), (PRF{1, 1, 1}));
}

TEST(PrfPartial, RepeatedUnigramsCountOnce) {
  const PRF p = prf_partial({"net net"}, {"net"});
  EXPECT_EQ(p, (PRF{1, 1, 1}));
}

TEST(PrfPartial, HyphenatedStaysWhole) {
  const PRF p = prf_partial({"state-of-the-art"}, {"state of the art"});
  EXPECT_EQ(p.precision, 0.0);
}

TEST(Prf, HarmonicMeanBounds) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> k(0, 6);
  const std::vector<std::string> vocab{"a", "b", "c d", "d", "e f g", "a b", "g"};
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> ext;
    std::set<std::string> gold;
    for (int j = k(rng); j > 0; --j) ext.push_back(vocab[static_cast<std::size_t>(k(rng))]);
    for (int j = 1 + k(rng); j > 0; --j) gold.insert(vocab[static_cast<std::size_t>(k(rng))]);
    for (const PRF& p : {prf_exact(normalize_ranked(ext), gold),
                         prf_partial(normalize_ranked(ext), gold)}) {
      for (double x : {p.precision, p.recall, p.f1}) {
        ASSERT_GE(x, 0.0);
        ASSERT_LE(x, 1.0);
      }
      ASSERT_LE(p.f1, std::max(p.precision, p.recall) + 1e-15);
      if (p.precision > 0 && p.recall > 0) {
        ASSERT_GE(p.f1, std::min(p.precision, p.recall) - 1e-15);
      } else {
        ASSERT_EQ(p.f1, 0.0);
      }
    }
  }
}

// ---- evaluate ---------------------------------------------------------------

// Extractor returning a fixed list per document id.
Extractor table_extractor(std::map<std::string, std::vector<std::string>> table) {
  return [table = std::move(table)](const GoldDocument& d, std::size_t max_n) {
    auto v = table.at(d.doc_id);
    if (v.size() > max_n) v.resize(max_n);
    return v;
  };
}

TEST(Evaluate, SingleDocumentMacroEqualsDocument) {
  const std::vector<GoldDocument> corpus{{"d", "", kGold}};
  const auto r = evaluate(corpus, table_extractor({{"d", kExtracted}}), {5, 10}, "t");
  EXPECT_EQ(r.macro, r.per_document.at("d"));
  EXPECT_NEAR(r.macro.at({Regime::kExact, 5}).f1, 0.4, 1e-12);
  EXPECT_EQ(r.extractor_name, "t");
  EXPECT_EQ(r.doc_order, (std::vector<std::string>{"d"}));
}

TEST(Evaluate, MacroIsArithmeticMean) {
  // Doc a: exact F1 0.4 (hand fixture). Doc b: P = 3/4, R = 1/2 -> F1 0.6.
  const std::vector<GoldDocument> corpus{
      {"a", "", kGold}, {"b", "", {"p1", "p2", "p3", "p4", "p5", "p6"}}};
  const auto r = evaluate(corpus,
                          table_extractor({{"a", kExtracted}, {"b", {"p1", "p2", "p3", "x"}}}),
                          {10});
  EXPECT_NEAR(r.per_document.at("b").at({Regime::kExact, 10}).f1, 0.6, 1e-12);
  EXPECT_NEAR(r.macro.at({Regime::kExact, 10}).f1, 0.5, 1e-12);
}

TEST(Evaluate, AverageRegimeIsMeanOfExactAndPartial) {
  // Exact P = 2/5 = 0.4; partial P = 4/5 = 0.8 over five distinct unigrams.
  const std::set<std::string> gold{"u1 u2", "u3", "u4 u9"};
  const std::vector<std::string> ext{"u1 u2", "u3", "u4", "u5", "u4 u1"};
  const std::vector<GoldDocument> corpus{{"d", "", gold}};
  const auto r = evaluate(corpus, table_extractor({{"d", ext}}), {5});
  const auto& t = r.per_document.at("d");
  EXPECT_NEAR(t.at({Regime::kExact, 5}).precision, 0.4, 1e-12);
  EXPECT_NEAR(t.at({Regime::kPartial, 5}).precision, 0.8, 1e-12);
  EXPECT_NEAR(t.at({Regime::kAverage, 5}).precision, 0.6, 1e-12);
}

TEST(Evaluate, EmptyExtractionContributesZeros) {
  const std::vector<GoldDocument> corpus{{"a", "", kGold}, {"b", "", kGold}};
  const auto r =
      evaluate(corpus, table_extractor({{"a", {"control"}}, {"b", {}}}), {5});
  EXPECT_NEAR(r.macro.at({Regime::kExact, 5}).precision, 0.5, 1e-12);
  EXPECT_EQ(r.per_document.at("b").at({Regime::kPartial, 5}), (PRF{0, 0, 0}));
}

TEST(Evaluate, SlicesPrefixOfOneExtraction) {
  int calls = 0;
  std::size_t asked = 0;
  Extractor ex = [&](const GoldDocument&, std::size_t max_n) {
    ++calls;
    asked = max_n;
    return std::vector<std::string>{"control", "x", "y", "fuzzy logic"};
  };
  const auto r = evaluate({{"d", "", kGold}}, ex, {1, 3, 20});
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(asked, 20u);
  const PRF at1 = r.per_document.at("d").at({Regime::kExact, 1});
  EXPECT_EQ(at1.precision, 1.0);
  EXPECT_NEAR(at1.recall, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(at1.f1, 0.5, 1e-12);
  // Precision denominator is the number returned, not N.
  EXPECT_NEAR(r.per_document.at("d").at({Regime::kExact, 20}).precision, 0.5, 1e-12);
}

TEST(Evaluate, ErrorsCarryDocumentId) {
  Extractor ex = [](const GoldDocument& d, std::size_t) -> std::vector<std::string> {
    if (d.doc_id == "bad") throw BackendFailure(BackendFailure::Cause::kTransport, "down");
    return {};
  };
  try {
    evaluate({{"ok", "", kGold}, {"bad", "", kGold}}, ex, {5});
    FAIL();
  } catch (const DocumentError& e) {
    EXPECT_EQ(e.doc_id(), "bad");
    EXPECT_THROW(std::rethrow_exception(e.cause()), BackendFailure);
  }
}

TEST(Evaluate, RejectsBadNValuesAndDuplicateIds) {
  const auto ex = table_extractor({{"a", {}}});
  EXPECT_THROW(evaluate({{"a", "", kGold}}, ex, {}), InvalidArgument);
  EXPECT_THROW(evaluate({{"a", "", kGold}}, ex, {0}), InvalidArgument);
  EXPECT_THROW(evaluate({{"a", "", kGold}, {"a", "", kGold}}, ex, {5}), InvalidArgument);
}

TEST(Evaluate, ThreadCountDoesNotChangeReport) {
  std::vector<GoldDocument> corpus;
  std::map<std::string, std::vector<std::string>> table;
  std::mt19937_64 rng(6);
  for (int i = 0; i < 50; ++i) {
    const std::string id = "d" + std::to_string(i);
    corpus.push_back({id, "", {"a b", "c", "d e"}});
    std::vector<std::string> ext;
    for (int j = 0; j < 6; ++j) ext.push_back(std::string(1, "abcde"[rng() % 5]));
    table[id] = ext;
  }
  const auto one = evaluate(corpus, table_extractor(table), {1, 2, 5}, "x", 1);
  const auto many = evaluate(corpus, table_extractor(table), {1, 2, 5}, "x", 8);
  EXPECT_EQ(one, many);
}

TEST(Evaluate, GoldPermutationInvariantExact) {
  std::vector<std::string> gold_list{"g1", "g2 x", "g3", "g4"};
  std::mt19937_64 rng(12);
  const std::vector<std::string> ext{"g3", "zz", "g2 x"};
  const PRF base = prf_exact(ext, {gold_list.begin(), gold_list.end()});
  for (int i = 0; i < 20; ++i) {
    std::shuffle(gold_list.begin(), gold_list.end(), rng);
    EXPECT_EQ(prf_exact(ext, {gold_list.begin(), gold_list.end()}), base);
  }
}

// ---- render_report ----------------------------------------------------------

EvalReport sample_report() {
  const std::vector<GoldDocument> corpus{{"a", "", kGold}, {"b", "", {"x y"}}};
  return evaluate(corpus, table_extractor({{"a", kExtracted}, {"b", {"x", "x y"}}}),
                  {5, 10, 20}, "patternrank_pos");
}

TEST(RenderReport, JsonRoundTrip) {
  const EvalReport r = sample_report();
  const std::string text = render_report(r, ReportFormat::kJson);
  EXPECT_EQ(report_from_json(nlohmann::json::parse(text)), r);
}

TEST(RenderReport, CsvOneRowPerRegimeAndN) {
  const std::string csv = render_report(sample_report(), ReportFormat::kCsv);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "regime,n,precision,recall,f1");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[0].substr(0, 8), "exact,5,");
  EXPECT_EQ(rows[8].substr(0, 11), "average,20,");
  // Doc a exact P 0.5, doc b exact P 0.5.
  EXPECT_EQ(rows[0].substr(8, 8), "0.500000");
}

TEST(RenderReport, TableContainsAllN) {
  const std::string table = render_report(sample_report(), ReportFormat::kTable);
  for (const char* s : {"@5", "@10", "@20", "Exact Match", "Partial Match", "Avg. Match",
                        "patternrank_pos"}) {
    EXPECT_NE(table.find(s), std::string::npos) << s;
  }
}

TEST(RenderReport, Deterministic) {
  for (auto f : {ReportFormat::kTable, ReportFormat::kJson, ReportFormat::kCsv}) {
    EXPECT_EQ(render_report(sample_report(), f), render_report(sample_report(), f));
  }
  EXPECT_THROW(report_format_from_name("xml"), InvalidArgument);
}

}  // namespace
}  // namespace patternrank
