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

#ifndef DEBIAS_MATCHER_HPP_
#define DEBIAS_MATCHER_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "debias/text.hpp"

namespace debias {

// Token sequences looked up in tokenized text. A pattern token "mr" also
// matches the abbreviation token "mr.".
class PhraseMatcher {
 public:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  struct Match {
    std::size_t phrase = 0;
    std::size_t first = 0;  // token index
    std::size_t last = 0;   // one past the final token
  };

  explicit PhraseMatcher(Abbreviations abbreviations = Abbreviations())
      : abbreviations_(std::move(abbreviations)) {}

  // Returns the phrase id, or kNone when `phrase` has no tokens.
  std::size_t add(std::string_view phrase) {
    auto tokens = tokenize(phrase, abbreviations_);
    if (tokens.empty()) return kNone;
    const std::size_t id = phrases_.size();
    auto& bucket = by_first_[strip_period(tokens.front())];
    phrases_.push_back(std::move(tokens));
    bucket.push_back(id);
    std::stable_sort(bucket.begin(), bucket.end(), [this](std::size_t a, std::size_t b) {
      return phrases_[a].size() > phrases_[b].size();
    });
    return id;
  }

  std::size_t size() const { return phrases_.size(); }
  const std::vector<std::string>& tokens(std::size_t id) const { return phrases_[id]; }
  const Abbreviations& abbreviations() const { return abbreviations_; }

  // Greedy left-to-right, longest phrase first, no token used twice. Among
  // equally long phrases the one added first wins.
  std::vector<Match> match(const std::vector<Token>& text) const {
    std::vector<Match> out;
    std::size_t i = 0;
    while (i < text.size()) {
      const std::size_t id = longest_at(text, i);
      if (id == kNone) {
        ++i;
        continue;
      }
      out.push_back(Match{id, i, i + phrases_[id].size()});
      i += phrases_[id].size();
    }
    return out;
  }

  // Counts every occurrence of every phrase independently (overlaps allowed).
  void count_all(const std::vector<Token>& text, std::vector<std::uint64_t>& counts) const {
    counts.resize(phrases_.size(), 0);
    for (std::size_t i = 0; i < text.size(); ++i) {
      const auto it = by_first_.find(strip_period(text[i].text));
      if (it == by_first_.end()) continue;
      for (std::size_t id : it->second) {
        if (matches_at(text, i, id)) ++counts[id];
      }
    }
  }

 private:
  static std::string strip_period(const std::string& token) {
    if (token.size() > 1 && token.back() == '.') return token.substr(0, token.size() - 1);
    return token;
  }

  static bool token_equal(const std::string& pattern, const std::string& token) {
    if (pattern == token) return true;
    return token.size() == pattern.size() + 1 && token.back() == '.' &&
           pattern.back() != '.' && token.compare(0, pattern.size(), pattern) == 0;
  }

  bool matches_at(const std::vector<Token>& text, std::size_t i, std::size_t id) const {
    const auto& p = phrases_[id];
    if (i + p.size() > text.size()) return false;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (!token_equal(p[k], text[i + k].text)) return false;
    }
    return true;
  }

  std::size_t longest_at(const std::vector<Token>& text, std::size_t i) const {
    const auto it = by_first_.find(strip_period(text[i].text));
    if (it == by_first_.end()) return kNone;
    for (std::size_t id : it->second) {
      if (matches_at(text, i, id)) return id;
    }
    return kNone;
  }

  Abbreviations abbreviations_;
  std::vector<std::vector<std::string>> phrases_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_first_;
};

}  // namespace debias

#endif  // DEBIAS_MATCHER_HPP_
