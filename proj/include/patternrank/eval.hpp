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

// Keyphrase evaluation: gold corpora, exact/partial/average match
// Precision@N, Recall@N and F1@N, macro-averaged over documents.

#ifndef PATTERNRANK_EVAL_HPP_
#define PATTERNRANK_EVAL_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "patternrank/document.hpp"
#include "patternrank/error.hpp"
#include "patternrank/parallel.hpp"

namespace patternrank {

// Lowercase, trim, collapse internal whitespace runs to one space.
inline std::string normalize_phrase(std::string_view phrase) {
  std::string out;
  bool pending_space = false;
  for (char c : ascii_lower(phrase)) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
        c == '\f') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

// Normalizes, drops empties and later duplicates; keeps first-seen order.
inline std::vector<std::string> normalize_ranked(
    const std::vector<std::string>& phrases) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& p : phrases) {
    std::string n = normalize_phrase(p);
    if (n.empty() || !seen.insert(n).second) continue;
    out.push_back(std::move(n));
  }
  return out;
}

struct GoldDocument {
  std::string doc_id;
  std::string text;
  std::set<std::string> gold;
};

namespace detail {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + p.string());
  return ss.str();
}

// Splits an Inspec keyphrase file on ';' and on line breaks. A line break
// followed by indentation continues the current phrase (the files wrap long
// phrases onto tab-indented lines).
inline std::vector<std::string> split_keyphrase_file(std::string_view content) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&]() {
    std::string n = normalize_phrase(cur);
    if (!n.empty()) out.push_back(std::move(n));
    cur.clear();
  };
  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (c == ';') {
      flush();
    } else if (c == '\n' || c == '\r') {
      const bool continuation = i + 1 < content.size() &&
                                (content[i + 1] == '\t' || content[i + 1] == ' ');
      if (continuation) cur.push_back(' ');
      else flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

}  // namespace detail

// Reads an Inspec-style tree: every *.abstr file below dir_path is a document
// whose gold set is the union of the sibling .contr and .uncontr files. The
// document id is the path relative to dir_path without extension.
inline std::vector<GoldDocument> load_inspec(const std::string& dir_path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir_path, ec)) {
    throw IoError("not a directory: " + dir_path);
  }
  std::vector<fs::path> abstracts;
  for (auto it = fs::recursive_directory_iterator(dir_path, ec);
       !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (it->is_regular_file() && it->path().extension() == ".abstr") {
      abstracts.push_back(it->path());
    }
  }
  if (ec) throw IoError("cannot scan " + dir_path + ": " + ec.message());
  std::sort(abstracts.begin(), abstracts.end());

  std::vector<GoldDocument> docs;
  docs.reserve(abstracts.size());
  for (const auto& abstr : abstracts) {
    GoldDocument doc;
    fs::path rel = fs::relative(abstr, dir_path);
    doc.doc_id = rel.replace_extension().generic_string();
    doc.text = detail::read_file(abstr);
    bool any_file = false;
    for (const char* ext : {".contr", ".uncontr"}) {
      fs::path keys = abstr;
      keys.replace_extension(ext);
      if (!fs::exists(keys)) continue;
      any_file = true;
      for (auto& k : detail::split_keyphrase_file(detail::read_file(keys))) {
        doc.gold.insert(std::move(k));
      }
    }
    if (!any_file || doc.gold.empty()) throw MissingGold(doc.doc_id);
    docs.push_back(std::move(doc));
  }
  return docs;
}

// One JSON object per line: {"id": str, "text": str, "keyphrases": [str]}.
// Blank lines are skipped. With require_gold=false the keyphrases field is
// optional (extraction input).
inline std::vector<GoldDocument> parse_jsonl(std::string_view content,
                                             bool require_gold = true) {
  std::vector<GoldDocument> docs;
  std::size_t line_no = 0, pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw MalformedLine(line_no, "not a JSON object");
    }
    GoldDocument doc;
    auto id = j.find("id");
    auto text = j.find("text");
    if (id == j.end() || !id->is_string()) {
      throw MalformedLine(line_no, "missing string field \"id\"");
    }
    if (text == j.end() || !text->is_string()) {
      throw MalformedLine(line_no, "missing string field \"text\"");
    }
    doc.doc_id = id->get<std::string>();
    doc.text = text->get<std::string>();
    auto keys = j.find("keyphrases");
    if (keys != j.end()) {
      if (!keys->is_array()) {
        throw MalformedLine(line_no, "\"keyphrases\" must be an array");
      }
      for (const auto& k : *keys) {
        if (!k.is_string()) {
          throw MalformedLine(line_no, "keyphrases must be strings");
        }
        std::string n = normalize_phrase(k.get<std::string>());
        if (!n.empty()) doc.gold.insert(std::move(n));
      }
    } else if (require_gold) {
      throw MalformedLine(line_no, "missing array field \"keyphrases\"");
    }
    if (require_gold && doc.gold.empty()) {
      throw MalformedLine(line_no, "no non-empty keyphrases");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

inline std::vector<GoldDocument> load_jsonl(const std::string& path,
                                             bool require_gold = true) {
  return parse_jsonl(detail::read_file(path), require_gold);
}

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static PRF from_counts(std::size_t tp, std::size_t extracted, std::size_t gold) {
    PRF r;
    r.precision = extracted == 0 ? 0.0 : static_cast<double>(tp) / extracted;
    r.recall = gold == 0 ? 0.0 : static_cast<double>(tp) / gold;
    r.f1 = harmonic(r.precision, r.recall);
    return r;
  }
  static double harmonic(double p, double r) {
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }

  friend bool operator==(const PRF&, const PRF&) = default;
};

namespace detail {

inline std::set<std::string> unigrams(const std::vector<std::string>& phrases) {
  std::set<std::string> out;
  for (const auto& p : phrases) {
    std::size_t i = 0;
    while (i < p.size()) {
      while (i < p.size() && p[i] == ' ') ++i;
      std::size_t j = i;
      while (j < p.size() && p[j] != ' ') ++j;
      if (j > i) out.emplace(p.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

inline std::size_t intersection_size(const std::set<std::string>& a,
                                     const std::set<std::string>& b) {
  std::size_t n = 0;
  for (const auto& x : a) n += b.count(x);
  return n;
}

}  // namespace detail

inline PRF prf_exact(const std::vector<std::string>& extracted_top_n,
                     const std::set<std::string>& gold) {
  if (gold.empty()) throw EmptyGold();
  const std::set<std::string> e(extracted_top_n.begin(), extracted_top_n.end());
  return PRF::from_counts(detail::intersection_size(e, gold), e.size(),
                          gold.size());
}

// Both sides are reduced to their whitespace-separated unigram sets.
inline PRF prf_partial(const std::vector<std::string>& extracted_top_n,
                       const std::set<std::string>& gold) {
  if (gold.empty()) throw EmptyGold();
  const auto e = detail::unigrams(extracted_top_n);
  const auto g =
      detail::unigrams(std::vector<std::string>(gold.begin(), gold.end()));
  return PRF::from_counts(detail::intersection_size(e, g), e.size(), g.size());
}

enum class Regime { kExact, kPartial, kAverage };

inline constexpr Regime kAllRegimes[] = {Regime::kExact, Regime::kPartial,
                                         Regime::kAverage};

inline std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::kExact: return "exact";
    case Regime::kPartial: return "partial";
    case Regime::kAverage: return "average";
  }
  return "exact";
}

inline Regime regime_from_name(std::string_view s) {
  for (Regime r : kAllRegimes) {
    if (regime_name(r) == s) return r;
  }
  throw InvalidArgument("unknown regime '" + std::string(s) + "'");
}

using ScoreKey = std::pair<Regime, std::size_t>;  // (regime, N)
using ScoreTable = std::map<ScoreKey, PRF>;

struct EvalReport {
  std::string extractor_name;
  std::vector<std::size_t> n_values;
  std::vector<std::string> doc_order;
  std::map<std::string, ScoreTable> per_document;
  ScoreTable macro;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Returns ranked keyphrases for a document, best first.
using Extractor =
    std::function<std::vector<std::string>(const GoldDocument&, std::size_t max_n)>;

// Scores one document's ranked output at every N.
inline ScoreTable score_document(const std::vector<std::string>& ranked,
                                 const std::set<std::string>& gold,
                                 const std::vector<std::size_t>& n_values) {
  const auto phrases = normalize_ranked(ranked);
  ScoreTable t;
  for (std::size_t n : n_values) {
    const std::vector<std::string> top(
        phrases.begin(),
        phrases.begin() + static_cast<long>(std::min(n, phrases.size())));
    const PRF exact = prf_exact(top, gold);
    const PRF partial = prf_partial(top, gold);
    t[{Regime::kExact, n}] = exact;
    t[{Regime::kPartial, n}] = partial;
    t[{Regime::kAverage, n}] = {(exact.precision + partial.precision) / 2.0,
                                (exact.recall + partial.recall) / 2.0,
                                (exact.f1 + partial.f1) / 2.0};
  }
  return t;
}

// Arithmetic mean of each cell over documents, in document order.
inline ScoreTable macro_average(const EvalReport& r) {
  ScoreTable sum;
  for (const auto& id : r.doc_order) {
    for (const auto& [key, prf] : r.per_document.at(id)) {
      PRF& s = sum[key];
      s.precision += prf.precision;
      s.recall += prf.recall;
      s.f1 += prf.f1;
    }
  }
  const double n = static_cast<double>(r.doc_order.size());
  if (n > 0) {
    for (auto& [key, s] : sum) {
      s.precision /= n;
      s.recall /= n;
      s.f1 /= n;
    }
  }
  return sum;
}

// Runs the extractor once per document for max(n_values) phrases and scores
// each top-N prefix. Documents must have distinct ids.
inline EvalReport evaluate(const std::vector<GoldDocument>& corpus,
                           const Extractor& extractor,
                           std::vector<std::size_t> n_values,
                           std::string extractor_name = {},
                           std::size_t threads = 1) {
  if (n_values.empty()) throw InvalidArgument("n_values must not be empty");
  for (std::size_t n : n_values) {
    if (n == 0) throw InvalidArgument("every N must be >= 1");
  }
  const std::size_t max_n = *std::max_element(n_values.begin(), n_values.end());

  std::vector<ScoreTable> tables(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    const GoldDocument& doc = corpus[i];
    std::vector<std::string> ranked;
    try {
      ranked = extractor(doc, max_n);
    } catch (const std::exception& e) {
      throw DocumentError(doc.doc_id, e.what(), std::current_exception());
    }
    tables[i] = score_document(ranked, doc.gold, n_values);
  });

  EvalReport report;
  report.extractor_name = std::move(extractor_name);
  report.n_values = std::move(n_values);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& id = corpus[i].doc_id;
    if (!report.per_document.emplace(id, std::move(tables[i])).second) {
      throw InvalidArgument("duplicate document id '" + id + "'");
    }
    report.doc_order.push_back(id);
  }
  report.macro = macro_average(report);
  return report;
}

// ---- serialization ----------------------------------------------------------

namespace detail {

inline nlohmann::json table_to_json(const ScoreTable& t) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, prf] : t) {
    j[std::string(regime_name(key.first))][std::to_string(key.second)] = {
        {"precision", prf.precision}, {"recall", prf.recall}, {"f1", prf.f1}};
  }
  return j;
}

inline ScoreTable table_from_json(const nlohmann::json& j) {
  ScoreTable t;
  for (const auto& [regime, by_n] : j.items()) {
    for (const auto& [n, prf] : by_n.items()) {
      t[{regime_from_name(regime), static_cast<std::size_t>(std::stoull(n))}] = {
          prf.at("precision").get<double>(), prf.at("recall").get<double>(),
          prf.at("f1").get<double>()};
    }
  }
  return t;
}

inline std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

inline std::string pad(std::string s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

}  // namespace detail

inline nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json j;
  j["extractor"] = r.extractor_name;
  j["n_values"] = r.n_values;
  j["documents"] = r.doc_order;
  j["macro"] = detail::table_to_json(r.macro);
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [id, t] : r.per_document) per[id] = detail::table_to_json(t);
  j["per_document"] = std::move(per);
  return j;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.extractor_name = j.at("extractor").get<std::string>();
  r.n_values = j.at("n_values").get<std::vector<std::size_t>>();
  r.doc_order = j.at("documents").get<std::vector<std::string>>();
  r.macro = detail::table_from_json(j.at("macro"));
  for (const auto& [id, t] : j.at("per_document").items()) {
    r.per_document[id] = detail::table_from_json(t);
  }
  return r;
}

enum class ReportFormat { kTable, kJson, kCsv };

inline ReportFormat report_format_from_name(std::string_view s) {
  if (s == "table") return ReportFormat::kTable;
  if (s == "json") return ReportFormat::kJson;
  if (s == "csv") return ReportFormat::kCsv;
  throw InvalidArgument("unknown report format '" + std::string(s) + "'");
}

// table: a regime x (P, R, F1)@N grid of macro scores in percent.
// json:  the full report with sorted keys.
// csv:   macro scores, header regime,n,precision,recall,f1.
inline std::string render_report(const EvalReport& r, ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::kJson:
      out << report_to_json(r).dump(2) << "\n";
      break;
    case ReportFormat::kCsv:
      out << "regime,n,precision,recall,f1\n";
      for (Regime g : kAllRegimes) {
        for (std::size_t n : r.n_values) {
          auto it = r.macro.find({g, n});
          if (it == r.macro.end()) continue;
          out << regime_name(g) << ',' << n << ','
              << detail::fixed(it->second.precision, 6) << ','
              << detail::fixed(it->second.recall, 6) << ','
              << detail::fixed(it->second.f1, 6) << "\n";
        }
      }
      break;
    case ReportFormat::kTable: {
      constexpr std::size_t kLabel = 15, kCell = 7;
      out << "Extractor: " << r.extractor_name << "  (documents: "
          << r.doc_order.size() << ")\n";
      out << detail::pad("", kLabel, true);
      for (std::size_t n : r.n_values) {
        out << "|" << detail::pad("@" + std::to_string(n), kCell * 2 + 1)
            << detail::pad("", kCell);
      }
      out << "|\n" << detail::pad("Regime", kLabel, true);
      for (std::size_t i = 0; i < r.n_values.size(); ++i) {
        out << "|" << detail::pad("P", kCell) << detail::pad("R", kCell)
            << detail::pad("F1", kCell) << " ";
      }
      out << "|\n";
      for (Regime g : kAllRegimes) {
        static const char* kLabels[] = {"Exact Match", "Partial Match",
                                        "Avg. Match"};
        out << detail::pad(kLabels[static_cast<int>(g)], kLabel, true);
        for (std::size_t n : r.n_values) {
          PRF p;
          if (auto it = r.macro.find({g, n}); it != r.macro.end()) p = it->second;
          out << "|" << detail::pad(detail::fixed(100 * p.precision, 2), kCell)
              << detail::pad(detail::fixed(100 * p.recall, 2), kCell)
              << detail::pad(detail::fixed(100 * p.f1, 2), kCell) << " ";
        }
        out << "|\n";
      }
      break;
    }
  }
  return out.str();
}

}  // namespace patternrank

#endif  // PATTERNRANK_EVAL_HPP_
