//
// Copyright 2026 The debias Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Endpoint-agnostic chat-completion requests, record/replay transcripts and
// tolerant JSON payload extraction.

#ifndef DEBIAS_LLM_HPP_
#define DEBIAS_LLM_HPP_

#include <openssl/evp.h>

#include <cstddef>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "debias/parallel.hpp"
#include "debias/prompts.hpp"
#include "debias/text.hpp"
#include "json.hpp"

namespace debias::llm {

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  // Unset leaves sampling at the endpoint default.
  std::optional<double> temperature;
  std::optional<int> max_output_tokens;
  // Identifies the call site (and run index where repeated sampling is
  // intended); part of the transcript key.
  std::string purpose;
};

class LlmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReplayMiss : public LlmError {
 public:
  explicit ReplayMiss(std::string key)
      : LlmError("no transcript entry for request " + key), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

// Stable key: purpose tag plus a digest of the message contents. Model name
// and sampling settings are deliberately excluded so one transcript can serve
// several endpoint configurations.
inline std::string request_key(const ChatRequest& req) {
  std::string material = req.purpose;
  for (const auto& m : req.messages) {
    material.push_back('\x1f');
    material += m.role;
    material.push_back('\x1e');
    material += m.content;
  }
  return req.purpose + ":" + sha256_hex(material).substr(0, 32);
}

inline void validate(const ChatRequest& req) {
  if (req.messages.empty()) throw LlmError("chat request has no messages");
  if (req.temperature && *req.temperature < 0.0) throw LlmError("negative temperature");
}

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const ChatRequest& req) = 0;
};

// Adapts a callable; used for stubs and scripted fakes.
class FunctionClient : public ChatClient {
 public:
  using Fn = std::function<std::string(const ChatRequest&)>;
  explicit FunctionClient(Fn fn) : fn_(std::move(fn)) {}
  std::string complete(const ChatRequest& req) override {
    validate(req);
    return fn_(req);
  }

 private:
  Fn fn_;
};

enum class TranscriptMode { kRecord, kReplay, kLive };

inline TranscriptMode parse_transcript_mode(std::string_view s) {
  if (s == "record") return TranscriptMode::kRecord;
  if (s == "replay") return TranscriptMode::kReplay;
  if (s == "live") return TranscriptMode::kLive;
  throw LlmError("unknown transcript mode '" + std::string(s) + "'");
}

// Ordered key -> response map backed by a JSONL file of {key, response}.
class Transcript {
 public:
  Transcript() = default;
  Transcript(Transcript&& other) noexcept
      : path_(std::move(other.path_)),
        entries_(std::move(other.entries_)),
        index_(std::move(other.index_)) {}
  Transcript& operator=(Transcript&& other) noexcept {
    path_ = std::move(other.path_);
    entries_ = std::move(other.entries_);
    index_ = std::move(other.index_);
    return *this;
  }

  static Transcript load(const std::string& path, bool must_exist) {
    Transcript t;
    t.path_ = path;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      if (must_exist) throw LlmError("cannot open transcript: " + path);
      return t;
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("key") || !j.contains("response")) {
        throw LlmError("malformed transcript line " + std::to_string(line_no) +
                       " in " + path);
      }
      t.insert(j["key"].get<std::string>(), j["response"].get<std::string>());
    }
    return t;
  }

  std::optional<std::string> find(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return entries_[it->second].second;
  }

  // Adds an entry (no-op for an existing key) and appends it to the backing
  // file when one is set. Returns true if the entry was new.
  bool record(const std::string& key, const std::string& response) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (index_.count(key)) return false;
    index_[key] = entries_.size();
    entries_.emplace_back(key, response);
    if (!path_.empty()) {
      std::ofstream out(path_, std::ios::binary | std::ios::app);
      if (!out) throw LlmError("cannot append to transcript: " + path_);
      out << nlohmann::json{{"key", key}, {"response", response}}.dump() << '\n';
    }
    return true;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
  }
  const std::string& path() const { return path_; }
  void set_path(std::string path) { path_ = std::move(path); }

 private:
  void insert(const std::string& key, const std::string& response) {
    if (index_.count(key)) return;
    index_[key] = entries_.size();
    entries_.emplace_back(key, response);
  }

  std::string path_;
  mutable std::mutex mutex_;
  std::vector<std::pair<std::string, std::string>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Routes requests through a transcript: replay never touches `inner`, record
// consults the transcript first and persists each new response, live passes
// straight through.
class TranscriptClient : public ChatClient {
 public:
  TranscriptClient(Transcript& transcript, TranscriptMode mode,
                   ChatClient* inner)
      : transcript_(transcript), mode_(mode), inner_(inner) {}

  std::string complete(const ChatRequest& req) override {
    validate(req);
    if (mode_ == TranscriptMode::kLive) return forward(req);
    const std::string key = request_key(req);
    if (auto hit = transcript_.find(key)) return *hit;
    if (mode_ == TranscriptMode::kReplay) throw ReplayMiss(key);
    std::string response = forward(req);
    transcript_.record(key, response);
    return response;
  }

  TranscriptMode mode() const { return mode_; }

 private:
  std::string forward(const ChatRequest& req) {
    if (inner_ == nullptr) throw LlmError("no live endpoint configured");
    return inner_->complete(req);
  }

  Transcript& transcript_;
  TranscriptMode mode_;
  ChatClient* inner_;
};

// Connection settings for one chat-completions endpoint.
struct EndpointConfig {
  std::string base_url = "http://localhost:8000/v1";
  std::string model = "default";
  double timeout_s = 60.0;
  int retries = 3;
  int backoff_ms = 500;
  int parallelism = 4;
  // Environment variable holding the bearer token; empty means no auth.
  std::string api_key_env = "OPENAI_API_KEY";
};

inline void from_json(const nlohmann::json& j, EndpointConfig& c) {
  c.base_url = j.value("base_url", c.base_url);
  c.model = j.value("model", c.model);
  c.timeout_s = j.value("timeout", c.timeout_s);
  c.retries = j.value("retries", c.retries);
  c.backoff_ms = j.value("backoff_ms", c.backoff_ms);
  c.parallelism = j.value("parallelism", c.parallelism);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  if (c.parallelism < 1) throw LlmError("endpoint parallelism must be >= 1");
  if (c.retries < 0) throw LlmError("endpoint retries must be >= 0");
}

inline void to_json(nlohmann::json& j, const EndpointConfig& c) {
  j = nlohmann::json{{"base_url", c.base_url},     {"model", c.model},
                     {"timeout", c.timeout_s},     {"retries", c.retries},
                     {"backoff_ms", c.backoff_ms}, {"parallelism", c.parallelism},
                     {"api_key_env", c.api_key_env}};
}

// ---------------------------------------------------------------------------
// Payload parsing

namespace detail {

// End offset (exclusive) of the balanced JSON value starting at `begin`, or
// npos when it never closes.
inline std::size_t balanced_end(std::string_view text, std::size_t begin) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = begin; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{' || c == '[') ++depth;
    else if (c == '}' || c == ']') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

inline std::string_view strip_fence(std::string_view text) {
  const auto open = text.find("```");
  if (open == std::string_view::npos) return text;
  auto body_start = text.find('\n', open);
  if (body_start == std::string_view::npos) return text;
  ++body_start;
  const auto close = text.find("```", body_start);
  return text.substr(body_start, close == std::string_view::npos
                                     ? std::string_view::npos
                                     : close - body_start);
}

}  // namespace detail

// First JSON object or array embedded in `text`, skipping code fences and
// surrounding prose.
inline std::optional<nlohmann::json> extract_json(std::string_view text) {
  const std::string_view body = detail::strip_fence(text);
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '{' && body[i] != '[') continue;
    const std::size_t end = detail::balanced_end(body, i);
    if (end == std::string_view::npos) continue;
    auto j = nlohmann::json::parse(body.substr(i, end - i), nullptr, false);
    if (!j.is_discarded()) return j;
  }
  return std::nullopt;
}

struct PayloadError {
  enum class Kind { kNoJson, kNotObject, kMissingField };
  Kind kind;
  std::string message;
  std::string field;  // set for kMissingField
};

using PayloadResult = std::variant<nlohmann::json, PayloadError>;

inline bool ok(const PayloadResult& r) {
  return std::holds_alternative<nlohmann::json>(r);
}

// Extracts the first JSON object and checks that every required field is
// present. Parse failures come back as PayloadError for the caller's repair
// policy.
inline PayloadResult parse_json_payload(
    std::string_view text, const std::vector<std::string>& required_fields) {
  auto j = extract_json(text);
  if (!j) return PayloadError{PayloadError::Kind::kNoJson, "no JSON value found", {}};
  if (!j->is_object()) {
    return PayloadError{PayloadError::Kind::kNotObject, "JSON payload is not an object", {}};
  }
  for (const auto& f : required_fields) {
    if (!j->contains(f)) {
      return PayloadError{PayloadError::Kind::kMissingField,
                          "missing field '" + f + "'", f};
    }
  }
  return *std::move(j);
}

// ---------------------------------------------------------------------------
// Dispatch

struct Response {
  std::optional<std::string> text;
  std::string error;  // set when text is empty
};

// Sends every request with at most `parallelism` in flight. Results line up
// with `requests`; failures are captured per request.
inline std::vector<Response> dispatch_bounded(ChatClient& client,
                                              const std::vector<ChatRequest>& requests,
                                              std::size_t parallelism) {
  std::vector<Response> out(requests.size());
  parallel_for(requests.size(), parallelism, [&](std::size_t i) {
    try {
      out[i].text = client.complete(requests[i]);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

// What a pipeline stage needs to talk to one endpoint.
struct Endpoint {
  ChatClient* client = nullptr;
  std::string model = "default";
  std::size_t parallelism = 1;
};

// Value or error message from a response parser.
template <typename T>
using Parsed = std::variant<T, std::string>;

// Sends `req`; if `parse` rejects the answer, sends one follow-up asking for a
// corrected answer (purpose tag gains ".repair"). Transport failures and
// replay misses are reported through the error alternative.
template <typename T, typename Parse>
Parsed<T> ask_with_repair(ChatClient& client, ChatRequest req, Parse parse) {
  std::string answer;
  try {
    answer = client.complete(req);
  } catch (const LlmError& e) {
    return std::string(e.what());
  }
  Parsed<T> first = parse(answer);
  if (first.index() == 0) return first;
  req.messages.push_back({"assistant", answer});
  req.messages.push_back(
      {"user", render(prompt_text::kRepair, {{"error", std::get<1>(first)}})});
  req.purpose += ".repair";
  try {
    return parse(client.complete(req));
  } catch (const LlmError& e) {
    return std::string(e.what());
  }
}

}  // namespace debias::llm

#endif  // DEBIAS_LLM_HPP_
