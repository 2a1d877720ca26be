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

// Out-of-process embedding backends.
//
// All three speak the same JSON schema:
//   request  {"texts": ["...", ...]}
//   response {"vectors": [[...], ...], "dim": D}
//
//   http:URL          POST URL/embed, one request per batch
//   stdio:CMD         /bin/sh -c CMD; one request line in, one response line out
//   precomputed:PATH  {"version": 1, "dim": D, "embeddings": {text: [...]}}
//   reference:DIM:SEED  in-process hashed trigram embedder

#ifndef PATTERNRANK_BACKENDS_HPP_
#define PATTERNRANK_BACKENDS_HPP_

#include <fcntl.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "patternrank/error.hpp"
#include "patternrank/eval.hpp"
#include "patternrank/ranker.hpp"

namespace patternrank {

namespace detail {

inline nlohmann::json embed_request(std::span<const std::string> texts) {
  nlohmann::json j;
  j["texts"] = nlohmann::json::array();
  for (const auto& t : texts) j["texts"].push_back(t);
  return j;
}

inline std::vector<EmbeddingVector> parse_embed_response(std::string_view body,
                                                         std::size_t expected) {
  using Cause = BackendFailure::Cause;
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw BackendFailure(Cause::kProtocol, "response is not a JSON object");
  }
  auto vectors = j.find("vectors");
  if (vectors == j.end() || !vectors->is_array()) {
    throw BackendFailure(Cause::kProtocol, "response lacks \"vectors\" array");
  }
  std::size_t dim = 0;
  if (auto d = j.find("dim"); d != j.end()) {
    if (!d->is_number_unsigned()) {
      throw BackendFailure(Cause::kProtocol, "\"dim\" must be a positive integer");
    }
    dim = d->get<std::size_t>();
  }
  if (vectors->size() != expected) {
    throw BackendFailure(Cause::kProtocol,
                         "expected " + std::to_string(expected) +
                             " vectors, got " + std::to_string(vectors->size()));
  }
  std::vector<EmbeddingVector> out;
  out.reserve(expected);
  for (const auto& v : *vectors) {
    if (!v.is_array()) throw BackendFailure(Cause::kProtocol, "vector not an array");
    std::vector<double> values;
    values.reserve(v.size());
    for (const auto& x : v) {
      if (!x.is_number()) {
        throw BackendFailure(Cause::kProtocol, "non-numeric vector component");
      }
      values.push_back(x.get<double>());
    }
    if (dim != 0 && values.size() != dim) {
      throw BackendFailure(Cause::kProtocol,
                           "vector of length " + std::to_string(values.size()) +
                               " but dim is " + std::to_string(dim));
    }
    out.emplace_back(std::move(values));
  }
  return out;
}

}  // namespace detail

class HttpBackend final : public EmbeddingBackend {
 public:
  // url: http://host[:port][/base]; requests go to <base>/embed.
  explicit HttpBackend(std::string url, std::size_t max_chars = 20000,
                       std::chrono::seconds timeout = std::chrono::seconds(120))
      : url_(std::move(url)), max_chars_(max_chars), timeout_(timeout) {
    constexpr std::string_view kScheme = "http://";
    std::string_view rest(url_);
    if (rest.starts_with("https://")) {
      throw ConfigError("https backends are not supported: " + url_);
    }
    if (rest.starts_with(kScheme)) rest.remove_prefix(kScheme.size());
    const auto slash = rest.find('/');
    std::string host_port(rest.substr(0, slash));
    if (slash != std::string_view::npos) base_path_ = rest.substr(slash);
    while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
    const auto colon = host_port.rfind(':');
    if (colon == std::string::npos) {
      host_ = host_port;
      port_ = 80;
    } else {
      host_ = host_port.substr(0, colon);
      try {
        port_ = std::stoi(host_port.substr(colon + 1));
      } catch (const std::exception&) {
        throw ConfigError("bad port in backend url: " + url_);
      }
    }
    if (host_.empty()) throw ConfigError("missing host in backend url: " + url_);
    endpoint_ = base_path_ + "/embed";
  }

  std::string name() const override { return "http:" + url_; }
  std::size_t dim() const override {
    std::lock_guard lock(mu_);
    return dim_;
  }
  bool supports_concurrent_calls() const override { return true; }
  std::size_t max_chars() const override { return max_chars_; }
  const std::string& endpoint_path() const { return endpoint_; }

  std::vector<EmbeddingVector> embed_batch(
      std::span<const std::string> texts) override {
    using Cause = BackendFailure::Cause;
    httplib::Client client(host_, port_);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    auto res = client.Post(endpoint_, detail::embed_request(texts).dump(),
                           "application/json");
    if (!res) {
      throw BackendFailure(Cause::kTransport,
                           "POST " + name() + "/embed failed: " +
                               httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw BackendFailure(Cause::kStatus, "POST " + name() + "/embed returned " +
                                               std::to_string(res->status));
    }
    auto out = detail::parse_embed_response(res->body, texts.size());
    if (!out.empty()) {
      std::lock_guard lock(mu_);
      if (dim_ == 0) dim_ = out.front().dim();
      for (const auto& v : out) {
        if (v.dim() != dim_) {
          throw BackendFailure(Cause::kProtocol, "dimension changed between calls");
        }
      }
    }
    return out;
  }

 private:
  std::string url_;
  std::string host_;
  int port_ = 80;
  std::string base_path_;
  std::string endpoint_ = "/embed";
  std::size_t max_chars_;
  std::chrono::seconds timeout_;
  mutable std::mutex mu_;
  std::size_t dim_ = 0;
};

// Child process speaking line-delimited JSON on stdin/stdout. Calls are
// serialized; the child is started lazily on first use.
class StdioBackend final : public EmbeddingBackend {
 public:
  explicit StdioBackend(std::string command) : command_(std::move(command)) {}
  StdioBackend(const StdioBackend&) = delete;
  StdioBackend& operator=(const StdioBackend&) = delete;
  ~StdioBackend() override { stop(); }

  std::string name() const override { return "stdio:" + command_; }
  std::size_t dim() const override {
    std::lock_guard lock(mu_);
    return dim_;
  }

  std::vector<EmbeddingVector> embed_batch(
      std::span<const std::string> texts) override {
    using Cause = BackendFailure::Cause;
    std::lock_guard lock(mu_);
    if (pid_ < 0) start();
    write_line(detail::embed_request(texts).dump() + "\n");
    auto out = detail::parse_embed_response(read_line(), texts.size());
    if (!out.empty()) {
      if (dim_ == 0) dim_ = out.front().dim();
      for (const auto& v : out) {
        if (v.dim() != dim_) {
          throw BackendFailure(Cause::kProtocol, "dimension changed between calls");
        }
      }
    }
    return out;
  }

 private:
  void start() {
    using Cause = BackendFailure::Cause;
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0) {
      throw BackendFailure(Cause::kTransport, std::strerror(errno));
    }
    if (pipe(from_child) != 0) {
      close(to_child[0]);
      close(to_child[1]);
      throw BackendFailure(Cause::kTransport, std::strerror(errno));
    }
    const pid_t pid = fork();
    if (pid < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) close(fd);
      throw BackendFailure(Cause::kTransport, std::strerror(errno));
    }
    if (pid == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) close(fd);
      execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    fcntl(to_child[1], F_SETFD, FD_CLOEXEC);
    fcntl(from_child[0], F_SETFD, FD_CLOEXEC);
    pid_ = pid;
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];
  }

  void stop() {
    if (pid_ < 0) return;
    if (in_fd_ >= 0) close(in_fd_);
    if (out_fd_ >= 0) close(out_fd_);
    in_fd_ = out_fd_ = -1;
    int status = 0;
    for (int i = 0; i < 100; ++i) {
      if (waitpid(pid_, &status, WNOHANG) != 0) {
        pid_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    kill(pid_, SIGTERM);
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }

  // Writes with SIGPIPE blocked so a dead child surfaces as EPIPE.
  void write_line(const std::string& line) {
    using Cause = BackendFailure::Cause;
    sigset_t pipe_set, old_set;
    sigemptyset(&pipe_set);
    sigaddset(&pipe_set, SIGPIPE);
    pthread_sigmask(SIG_BLOCK, &pipe_set, &old_set);
    std::size_t done = 0;
    int err = 0;
    while (done < line.size()) {
      const ssize_t n = write(in_fd_, line.data() + done, line.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        err = errno;
        break;
      }
      done += static_cast<std::size_t>(n);
    }
    if (err == EPIPE) {
      const timespec zero{0, 0};
      sigtimedwait(&pipe_set, nullptr, &zero);
    }
    pthread_sigmask(SIG_SETMASK, &old_set, nullptr);
    if (err != 0) {
      throw BackendFailure(Cause::kTransport,
                           "write to '" + command_ + "' failed: " + std::strerror(err));
    }
  }

  std::string read_line() {
    using Cause = BackendFailure::Cause;
    while (true) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      char chunk[65536];
      const ssize_t n = read(out_fd_, chunk, sizeof(chunk));
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        throw BackendFailure(Cause::kTransport,
                             "'" + command_ + "' closed its output");
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  std::string command_;
  mutable std::mutex mu_;
  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  std::string buffer_;
  std::size_t dim_ = 0;
};

inline constexpr int kPrecomputedVersion = 1;

// Lookup table from exact text to vector.
class PrecomputedBackend final : public EmbeddingBackend {
 public:
  PrecomputedBackend(std::unordered_map<std::string, EmbeddingVector> table,
                     std::size_t dim, std::string origin = "memory")
      : table_(std::move(table)), dim_(dim), origin_(std::move(origin)) {
    for (const auto& [text, v] : table_) {
      if (v.dim() != dim_) {
        throw InvalidArgument("precomputed vector for '" + text +
                              "' has wrong dimension");
      }
    }
  }

  static PrecomputedBackend from_json(const nlohmann::json& j,
                                      std::string origin = "memory") {
    try {
      if (j.at("version").get<int>() != kPrecomputedVersion) {
        throw InvalidArgument("unsupported precomputed embedding version");
      }
      const auto dim = j.at("dim").get<std::size_t>();
      std::unordered_map<std::string, EmbeddingVector> table;
      for (const auto& [text, v] : j.at("embeddings").items()) {
        table.emplace(text, EmbeddingVector(v.get<std::vector<double>>()));
      }
      return PrecomputedBackend(std::move(table), dim, std::move(origin));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("bad precomputed embedding file: ") +
                            e.what());
    }
  }

  static PrecomputedBackend load(const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(detail::read_file(path), nullptr, false);
    if (j.is_discarded()) throw InvalidArgument("precomputed file is not JSON: " + path);
    return from_json(j, path);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["version"] = kPrecomputedVersion;
    j["dim"] = dim_;
    nlohmann::json e = nlohmann::json::object();
    for (const auto& [text, v] : table_) e[text] = v.values;
    j["embeddings"] = std::move(e);
    return j;
  }

  std::string name() const override { return "precomputed:" + origin_; }
  std::size_t dim() const override { return dim_; }
  bool supports_concurrent_calls() const override { return true; }

  std::vector<EmbeddingVector> embed_batch(
      std::span<const std::string> texts) override {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
      auto it = table_.find(t);
      if (it == table_.end()) {
        throw BackendFailure(BackendFailure::Cause::kMissingEmbedding,
                             "MissingEmbedding for text '" + t + "'");
      }
      out.push_back(it->second);
    }
    return out;
  }

 private:
  std::unordered_map<std::string, EmbeddingVector> table_;
  std::size_t dim_;
  std::string origin_;
};

// Parsed form of a --backend value.
struct BackendSpec {
  enum class Kind { kHttp, kStdio, kPrecomputed, kReference };
  Kind kind = Kind::kReference;
  std::string target;  // url, command, or path
  std::size_t dim = 256;
  std::uint64_t seed = 0;

  std::string to_string() const {
    switch (kind) {
      case Kind::kHttp: return "http:" + target;
      case Kind::kStdio: return "stdio:" + target;
      case Kind::kPrecomputed: return "precomputed:" + target;
      case Kind::kReference:
        return "reference:" + std::to_string(dim) + ":" + std::to_string(seed);
    }
    return {};
  }

  friend bool operator==(const BackendSpec&, const BackendSpec&) = default;
};

inline BackendSpec parse_backend_spec(std::string_view spec) {
  // A bare http:// URL is accepted as shorthand for http:URL.
  if (spec.starts_with("http://")) {
    BackendSpec out;
    out.kind = BackendSpec::Kind::kHttp;
    out.target = std::string(spec);
    return out;
  }
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("backend must be http:URL, stdio:CMD, precomputed:PATH "
                      "or reference:DIM:SEED, got '" + std::string(spec) + "'");
  }
  const std::string_view kind = spec.substr(0, colon);
  const std::string rest(spec.substr(colon + 1));
  BackendSpec out;
  if (kind == "http") {
    out.kind = BackendSpec::Kind::kHttp;
  } else if (kind == "stdio") {
    out.kind = BackendSpec::Kind::kStdio;
  } else if (kind == "precomputed") {
    out.kind = BackendSpec::Kind::kPrecomputed;
  } else if (kind == "reference") {
    out.kind = BackendSpec::Kind::kReference;
    const auto sep = rest.find(':');
    try {
      std::size_t used = 0;
      const std::string dim_s = rest.substr(0, sep);
      out.dim = std::stoull(dim_s, &used);
      if (used != dim_s.size()) throw std::invalid_argument("dim");
      if (sep != std::string::npos) {
        const std::string seed_s = rest.substr(sep + 1);
        out.seed = std::stoull(seed_s, &used);
        if (used != seed_s.size()) throw std::invalid_argument("seed");
      }
    } catch (const std::exception&) {
      throw ConfigError("reference backend must be reference:DIM:SEED, got '" +
                        std::string(spec) + "'");
    }
    if (out.dim < 16) throw ConfigError("reference backend needs DIM >= 16");
    return out;
  } else {
    throw ConfigError("unknown backend kind '" + std::string(kind) + "'");
  }
  if (rest.empty()) throw ConfigError("backend '" + std::string(spec) + "' has no target");
  out.target = rest;
  return out;
}

inline std::unique_ptr<EmbeddingBackend> make_backend(const BackendSpec& spec) {
  switch (spec.kind) {
    case BackendSpec::Kind::kHttp:
      return std::make_unique<HttpBackend>(spec.target);
    case BackendSpec::Kind::kStdio:
      return std::make_unique<StdioBackend>(spec.target);
    case BackendSpec::Kind::kPrecomputed:
      return std::make_unique<PrecomputedBackend>(
          PrecomputedBackend::load(spec.target));
    case BackendSpec::Kind::kReference:
      return std::make_unique<ReferenceEmbedder>(spec.dim, spec.seed);
  }
  throw ConfigError("unknown backend");
}

}  // namespace patternrank

#endif  // PATTERNRANK_BACKENDS_HPP_
