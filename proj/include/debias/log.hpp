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

#ifndef DEBIAS_LOG_HPP_
#define DEBIAS_LOG_HPP_

#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace debias {

// Process-wide warning sink. Defaults to stderr; tests swap it to capture
// messages.
class Log {
 public:
  using Sink = std::function<void(std::string_view)>;

  static void warn(std::string_view message) {
    auto& self = instance();
    std::lock_guard<std::mutex> lock(self.mutex_);
    if (self.sink_) {
      self.sink_(message);
    } else {
      std::cerr << "warning: " << message << '\n';
    }
  }

  // Returns the previous sink so callers can restore it.
  static Sink set_sink(Sink sink) {
    auto& self = instance();
    std::lock_guard<std::mutex> lock(self.mutex_);
    return std::exchange(self.sink_, std::move(sink));
  }

 private:
  static Log& instance() {
    static Log log;
    return log;
  }

  std::mutex mutex_;
  Sink sink_;
};

// Captures warnings for the lifetime of the object.
class ScopedWarningCapture {
 public:
  ScopedWarningCapture()
      : previous_(Log::set_sink([this](std::string_view m) {
          messages_.emplace_back(m);
        })) {}
  ~ScopedWarningCapture() { Log::set_sink(std::move(previous_)); }
  ScopedWarningCapture(const ScopedWarningCapture&) = delete;
  ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
  Log::Sink previous_;
};

}  // namespace debias

#endif  // DEBIAS_LOG_HPP_
