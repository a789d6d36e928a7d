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

// Live transport for OpenAI-style /chat/completions endpoints. Build with
// CPPHTTPLIB_OPENSSL_SUPPORT defined (and link OpenSSL) to reach https URLs.

#ifndef DEBIAS_HTTP_CLIENT_HPP_
#define DEBIAS_HTTP_CLIENT_HPP_

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>

#include "debias/llm.hpp"
#include "httplib.h"
#include "json.hpp"

namespace debias::llm {

class MissingCredential : public LlmError {
 public:
  explicit MissingCredential(const std::string& var)
      : LlmError("credential environment variable " + var + " is not set") {}
};

class RetriesExhausted : public LlmError {
 public:
  using LlmError::LlmError;
};

inline nlohmann::json chat_completion_body(const ChatRequest& req,
                                           const std::string& model) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : req.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  nlohmann::json body{{"model", req.model.empty() ? model : req.model},
                      {"messages", messages}};
  if (req.temperature) body["temperature"] = *req.temperature;
  if (req.max_output_tokens) body["max_tokens"] = *req.max_output_tokens;
  return body;
}

// Pulls choices[0].message.content out of a chat-completions response.
inline std::string completion_text(const nlohmann::json& response) {
  const auto& choices = response.at("choices");
  if (!choices.is_array() || choices.empty()) {
    throw LlmError("response has no choices");
  }
  const auto& content = choices.at(0).at("message").at("content");
  if (!content.is_string()) throw LlmError("response content is not text");
  return content.get<std::string>();
}

class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(EndpointConfig config) : config_(std::move(config)) {
    if (!config_.api_key_env.empty()) {
      const char* key = std::getenv(config_.api_key_env.c_str());
      if (key == nullptr || *key == '\0') {
        throw MissingCredential(config_.api_key_env);
      }
      api_key_ = key;
    }
    // Split "scheme://host[:port]/prefix" into client origin and path prefix.
    const auto scheme_end = config_.base_url.find("://");
    const auto path_start = config_.base_url.find(
        '/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    origin_ = config_.base_url.substr(0, path_start);
    prefix_ = path_start == std::string::npos
                  ? ""
                  : config_.base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  std::string complete(const ChatRequest& req) override {
    validate(req);
    const std::string body = chat_completion_body(req, config_.model).dump();
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    std::string last_error;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(config_.backoff_ms << (attempt - 1)));
      }
      httplib::Client client(origin_);
      const auto timeout = std::chrono::duration<double>(config_.timeout_s);
      client.set_connection_timeout(
          std::chrono::duration_cast<std::chrono::microseconds>(timeout));
      client.set_read_timeout(
          std::chrono::duration_cast<std::chrono::microseconds>(timeout));
      auto res = client.Post(prefix_ + "/chat/completions", headers, body,
                             "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 408 || res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        throw LlmError("HTTP " + std::to_string(res->status) + ": " + res->body);
      }
      auto json = nlohmann::json::parse(res->body, nullptr, false);
      if (json.is_discarded()) throw LlmError("response body is not JSON");
      return completion_text(json);
    }
    throw RetriesExhausted("request failed after " +
                           std::to_string(config_.retries + 1) +
                           " attempts: " + last_error);
  }

 private:
  EndpointConfig config_;
  std::string api_key_;
  std::string origin_;
  std::string prefix_;
};

}  // namespace debias::llm

#endif  // DEBIAS_HTTP_CLIENT_HPP_
