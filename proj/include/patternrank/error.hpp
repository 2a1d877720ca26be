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

#ifndef PATTERNRANK_ERROR_HPP_
#define PATTERNRANK_ERROR_HPP_

#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>
#include <utility>

namespace patternrank {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// ---- textpipe ---------------------------------------------------------------

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("tagger training corpus is empty") {}
};

class MalformedConllu : public Error {
 public:
  MalformedConllu(std::size_t line, const std::string& why)
      : Error("malformed CoNLL-U at line " + std::to_string(line) + ": " + why),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ModelFormatError : public Error {
 public:
  using Error::Error;
};

// ---- pattern ----------------------------------------------------------------

class ParseError : public Error {
 public:
  ParseError(std::size_t position, std::string expected)
      : Error("pattern parse error at position " + std::to_string(position) +
              ": expected " + expected),
        position_(position),
        expected_(std::move(expected)) {}
  std::size_t position() const { return position_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

class UnknownTag : public Error {
 public:
  explicit UnknownTag(std::string name)
      : Error("unknown pattern tag '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class InvalidRange : public Error {
 public:
  using Error::Error;
};

// ---- ranker -----------------------------------------------------------------

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t a, std::size_t b)
      : Error("embedding dimension mismatch: " + std::to_string(a) + " vs " +
              std::to_string(b)) {}
};

class ZeroVector : public Error {
 public:
  ZeroVector() : Error("cosine undefined for an all-zero vector") {}
};

class InvalidN : public Error {
 public:
  InvalidN() : Error("top-n requires n >= 1") {}
};

class BackendFailure : public Error {
 public:
  enum class Cause { kTransport, kStatus, kProtocol, kMissingEmbedding };

  BackendFailure(Cause cause, const std::string& what)
      : Error("embedding backend failure: " + what), cause_(cause) {}
  Cause cause() const { return cause_; }

 private:
  Cause cause_;
};

// ---- singlerank -------------------------------------------------------------

class EmptyGraph : public Error {
 public:
  EmptyGraph() : Error("co-occurrence graph has no nodes") {}
};

// ---- eval -------------------------------------------------------------------

class MissingGold : public Error {
 public:
  explicit MissingGold(std::string doc_id)
      : Error("no gold keyphrases for document '" + doc_id + "'"),
        doc_id_(std::move(doc_id)) {}
  const std::string& doc_id() const { return doc_id_; }

 private:
  std::string doc_id_;
};

class MalformedLine : public Error {
 public:
  MalformedLine(std::size_t line, const std::string& why)
      : Error("malformed corpus line " + std::to_string(line) + ": " + why),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyGold : public Error {
 public:
  EmptyGold() : Error("gold keyphrase set is empty") {}
};

// Wraps a failure raised while processing one document. The original
// exception stays reachable through cause().
class DocumentError : public Error {
 public:
  DocumentError(std::string doc_id, const std::string& what,
                std::exception_ptr cause)
      : Error("document '" + doc_id + "': " + what),
        doc_id_(std::move(doc_id)),
        cause_(std::move(cause)) {}
  const std::string& doc_id() const { return doc_id_; }
  const std::exception_ptr& cause() const { return cause_; }

 private:
  std::string doc_id_;
  std::exception_ptr cause_;
};

// ---- cli --------------------------------------------------------------------

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace patternrank

#endif  // PATTERNRANK_ERROR_HPP_
