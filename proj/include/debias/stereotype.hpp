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

// Explicit stereotypes: LLM detection, SCSC indicator assessment, linear
// scoring and threshold filtering.

#ifndef DEBIAS_STEREOTYPE_HPP_
#define DEBIAS_STEREOTYPE_HPP_

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "debias/corpus.hpp"
#include "debias/indicators.hpp"
#include "debias/llm.hpp"
#include "debias/log.hpp"
#include "debias/parallel.hpp"
#include "debias/prompts.hpp"
#include "debias/text.hpp"
#include "json.hpp"

namespace debias {

class StereotypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StereotypeConfig {
  double threshold = 0.63;
  int max_tokens = 47;

  void validate() const {
    if (threshold < 0.0 || threshold > 1.0) throw StereotypeError("threshold must be in [0,1]");
    if (max_tokens < 1) throw StereotypeError("max_tokens must be positive");
  }
};

// ---------------------------------------------------------------------------
// Detection

struct DetectionResult {
  bool has_category_label = false;
  std::string full_label{kNotApplicable};
  std::string beliefs_expectancies{kNotApplicable};  // yes | no | not-applicable
  std::string information{kNotApplicable};
  std::string behavior_features_traits{kNotApplicable};
  bool stereotype = false;

  friend bool operator==(const DetectionResult&, const DetectionResult&) = default;
};

inline void to_json(nlohmann::json& j, const DetectionResult& r) {
  j = nlohmann::json{{"has_category_label", r.has_category_label ? "yes" : "no"},
                     {"full_label", r.full_label},
                     {"beliefs_expectancies", r.beliefs_expectancies},
                     {"information", r.information},
                     {"behavior_features_traits", r.behavior_features_traits},
                     {"stereotype", r.stereotype ? "yes" : "no"}};
}

namespace detail {

inline std::optional<bool> yes_no(const nlohmann::json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (!v.is_string()) return std::nullopt;
  const std::string s = to_lower(trim(v.get<std::string>()));
  if (s == "yes") return true;
  if (s == "no") return false;
  return std::nullopt;
}

inline std::optional<std::string> ternary(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return std::string(kNotApplicable);
  const auto& v = j.at(key);
  if (auto b = yes_no(v)) return std::string(*b ? "yes" : "no");
  if (v.is_string() && canonical_answer(v.get<std::string>()) == kNotApplicable) {
    return std::string(kNotApplicable);
  }
  return std::nullopt;
}

inline std::string free_text(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return std::string(kNotApplicable);
  const auto& v = j.at(key);
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (canonical_answer(s) == kNotApplicable) return std::string(kNotApplicable);
  return s;
}

}  // namespace detail

// Validates a detection payload. A missing category label forces every
// dependent answer to not-applicable and the verdict to no.
inline llm::Parsed<DetectionResult> parse_detection(const std::string& text) {
  auto payload = llm::parse_json_payload(text, {"has_category_label", "stereotype"});
  if (!llm::ok(payload)) return std::get<llm::PayloadError>(payload).message;
  const auto& j = std::get<nlohmann::json>(payload);
  const auto label = detail::yes_no(j.at("has_category_label"));
  const auto verdict = detail::yes_no(j.at("stereotype"));
  if (!label) return std::string("has_category_label must be yes or no");
  if (!verdict) return std::string("stereotype must be yes or no");
  DetectionResult r;
  r.has_category_label = *label;
  if (!r.has_category_label) return r;
  const auto beliefs = detail::ternary(j, "beliefs_expectancies");
  const auto traits = detail::ternary(j, "behavior_features_traits");
  if (!beliefs) return std::string("beliefs_expectancies must be yes, no or not-applicable");
  if (!traits) return std::string("behavior_features_traits must be yes, no or not-applicable");
  r.full_label = detail::free_text(j, "full_label");
  r.beliefs_expectancies = *beliefs;
  r.information = detail::free_text(j, "information");
  r.behavior_features_traits = *traits;
  r.stereotype = *verdict;
  return r;
}

inline llm::ChatRequest detection_request(const std::string& context, const std::string& sentence,
                                          const std::string& model,
                                          const PromptCatalog& prompts = PromptCatalog::defaults()) {
  llm::ChatRequest req;
  req.model = model;
  req.temperature = 0.0;
  req.messages = {
      {"system", prompts.get("detect.task")},
      {"user", prompts.get("detect.examples") + "\n\n" +
                   render(prompts.get("detect.query"),
                          {{"context", context}, {"sentence", sentence}})}};
  req.purpose = "stereotype.detect";
  return req;
}

inline llm::Parsed<DetectionResult> detect(const std::string& context, const std::string& sentence,
                                           const llm::Endpoint& endpoint,
                                           const PromptCatalog& prompts = PromptCatalog::defaults()) {
  return llm::ask_with_repair<DetectionResult>(
      *endpoint.client, detection_request(context, sentence, endpoint.model, prompts),
      parse_detection);
}

// Preceding sentence of the same document, or "" for the first sentence.
// Entities must be sorted by (doc_id, sent_id).
inline std::vector<std::string> preceding_contexts(const std::vector<SentenceEntity>& entities) {
  std::vector<std::string> out(entities.size());
  for (std::size_t i = 1; i < entities.size(); ++i) {
    const auto& prev = entities[i - 1];
    if (prev.doc_id == entities[i].doc_id && prev.sent_id + 1 == entities[i].sent_id) {
      out[i] = prev.text;
    }
  }
  return out;
}

struct DetectionStats {
  std::size_t candidates = 0;  // relevant sentences
  std::size_t too_long = 0;
  std::size_t failed = 0;
  std::size_t flagged = 0;
};

// Sets potential_stereotype and detection_status on every entity. Only
// relevant sentences within the token limit reach the model; failures are
// treated as not stereotyped.
inline DetectionStats run_detection(std::vector<SentenceEntity>& entities,
                                    const llm::Endpoint& endpoint, const StereotypeConfig& config,
                                    const Abbreviations& abbreviations = Abbreviations(),
                                    const PromptCatalog& prompts = PromptCatalog::defaults()) {
  config.validate();
  std::sort(entities.begin(), entities.end(), entity_order);
  const auto contexts = preceding_contexts(entities);
  DetectionStats stats;
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < entities.size(); ++i) {
    auto& md = entities[i].metadata;
    md.potential_stereotype = false;
    md.detection_status.reset();
    if (!md.relevant_sentence) continue;
    ++stats.candidates;
    if (tokenize(entities[i].text, abbreviations).size() >
        static_cast<std::size_t>(config.max_tokens)) {
      md.detection_status = DetectionStatus::kTooLong;
      ++stats.too_long;
      continue;
    }
    todo.push_back(i);
  }
  std::vector<llm::Parsed<DetectionResult>> results(todo.size(), std::string("not run"));
  parallel_for(todo.size(), endpoint.parallelism, [&](std::size_t k) {
    const std::size_t i = todo[k];
    results[k] = detect(contexts[i], entities[i].text, endpoint, prompts);
  });
  for (std::size_t k = 0; k < todo.size(); ++k) {
    auto& e = entities[todo[k]];
    if (const auto* err = std::get_if<std::string>(&results[k])) {
      Log::warn("detect: " + e.doc_id + "#" + std::to_string(e.sent_id) + " failed: " + *err);
      e.metadata.detection_status = DetectionStatus::kFailed;
      ++stats.failed;
      continue;
    }
    e.metadata.potential_stereotype = std::get<DetectionResult>(results[k]).stereotype;
    if (e.metadata.potential_stereotype) ++stats.flagged;
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Assessment

inline llm::Parsed<IndicatorRecord> parse_assessment(const std::string& text) {
  auto payload = llm::parse_json_payload(text, {"has_category_label"});
  if (!llm::ok(payload)) return std::get<llm::PayloadError>(payload).message;
  try {
    return indicator_record_from_json(std::get<nlohmann::json>(payload));
  } catch (const IndicatorError& e) {
    return std::string(e.what());
  }
}

inline llm::ChatRequest assessment_request(const std::string& sentence, const std::string& model,
                                           const PromptCatalog& prompts = PromptCatalog::defaults()) {
  llm::ChatRequest req;
  req.model = model;
  req.temperature = 0.0;
  req.messages = {{"system", prompts.get("assess.task")},
                  {"user", prompts.get("assess.examples") + "\n\n" +
                               render(prompts.get("assess.query"), {{"sentence", sentence}})}};
  req.purpose = "stereotype.assess";
  return req;
}

inline llm::Parsed<IndicatorRecord> assess(const std::string& sentence,
                                           const llm::Endpoint& endpoint,
                                           const PromptCatalog& prompts = PromptCatalog::defaults()) {
  return llm::ask_with_repair<IndicatorRecord>(
      *endpoint.client, assessment_request(sentence, endpoint.model, prompts), parse_assessment);
}

struct AssessmentStats {
  std::size_t assessed = 0;
  std::size_t failed = 0;
};

// Sets linguistic_indicators / assessment_status. Entities without
// potential_stereotype are never sent to the model.
inline AssessmentStats run_assessment(std::vector<SentenceEntity>& entities,
                                      const llm::Endpoint& endpoint,
                                      const PromptCatalog& prompts = PromptCatalog::defaults()) {
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < entities.size(); ++i) {
    auto& md = entities[i].metadata;
    md.linguistic_indicators.reset();
    md.assessment_status.reset();
    if (md.potential_stereotype) todo.push_back(i);
  }
  std::vector<llm::Parsed<IndicatorRecord>> results(todo.size(), std::string("not run"));
  parallel_for(todo.size(), endpoint.parallelism, [&](std::size_t k) {
    results[k] = assess(entities[todo[k]].text, endpoint, prompts);
  });
  AssessmentStats stats;
  for (std::size_t k = 0; k < todo.size(); ++k) {
    auto& e = entities[todo[k]];
    if (const auto* err = std::get_if<std::string>(&results[k])) {
      Log::warn("assess: " + e.doc_id + "#" + std::to_string(e.sent_id) + " failed: " + *err);
      e.metadata.assessment_status = AssessmentStatus::kFailed;
      ++stats.failed;
      continue;
    }
    e.metadata.linguistic_indicators = std::get<IndicatorRecord>(results[k]);
    ++stats.assessed;
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Scoring

// One-hot linear model over indicator values, min-max scaled to [0, 1].
class ScoreModel {
 public:
  using Weights = std::map<std::string, std::map<std::string, double>>;

  ScoreModel(Weights weights, double intercept, double scale_min, double scale_max,
             std::string version = "custom")
      : weights_(std::move(weights)),
        intercept_(intercept),
        scale_min_(scale_min),
        scale_max_(scale_max),
        version_(std::move(version)) {
    validate();
  }

  static ScoreModel from_json(const nlohmann::json& j) {
    try {
      return ScoreModel(j.at("weights").get<Weights>(), j.value("intercept", 0.0),
                        j.at("scale_min").get<double>(), j.at("scale_max").get<double>(),
                        j.value("version", std::string("unversioned")));
    } catch (const nlohmann::json::exception& e) {
      throw StereotypeError(std::string("score model: ") + e.what());
    }
  }

  static ScoreModel load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StereotypeError("cannot open score model " + path);
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw StereotypeError("score model " + path + " is not JSON");
    return from_json(j);
  }

  nlohmann::json to_json() const {
    return {{"version", version_},     {"intercept", intercept_}, {"scale_min", scale_min_},
            {"scale_max", scale_max_}, {"weights", weights_}};
  }

  double weight(std::string_view indicator, std::string_view value) const {
    return weights_.at(std::string(indicator)).at(std::string(value));
  }

  double raw(const IndicatorRecord& rec) const {
    double sum = intercept_;
    for (const auto& [indicator, value] : rec.features()) sum += weight(indicator, value);
    return sum;
  }

  double unclamped(const IndicatorRecord& rec) const {
    return (raw(rec) - scale_min_) / (scale_max_ - scale_min_);
  }

  double score(const IndicatorRecord& rec) const {
    return std::clamp(unclamped(rec), 0.0, 1.0);
  }

  double scale_min() const { return scale_min_; }
  double scale_max() const { return scale_max_; }
  double span() const { return scale_max_ - scale_min_; }
  const std::string& version() const { return version_; }
  const Weights& weights() const { return weights_; }

 private:
  void validate() const {
    if (!(scale_min_ < scale_max_)) throw StereotypeError("score model needs scale_min < scale_max");
    for (const auto& [indicator, values] : indicator_schema()) {
      auto it = weights_.find(indicator);
      if (it == weights_.end()) throw StereotypeError("score model lacks indicator " + indicator);
      for (const auto& v : values) {
        if (!it->second.count(v)) {
          throw StereotypeError("score model lacks weight for " + indicator + "=" + v);
        }
      }
    }
  }

  Weights weights_;
  double intercept_;
  double scale_min_;
  double scale_max_;
  std::string version_;
};

inline double score(const IndicatorRecord& rec, const ScoreModel& model) {
  return model.score(rec);
}

struct FilterStats {
  std::size_t scored = 0;
  std::size_t removed = 0;
};

// Scores assessed sentences and flags those strictly above the threshold.
// Sentences without an assessment are never removed.
inline FilterStats filter(std::vector<SentenceEntity>& entities, const ScoreModel& model,
                          const StereotypeConfig& config) {
  config.validate();
  FilterStats stats;
  for (auto& e : entities) {
    auto& md = e.metadata;
    md.score_scsc.reset();
    md.remove_sentence = false;
    if (!md.potential_stereotype || !md.linguistic_indicators) continue;
    md.score_scsc = model.score(*md.linguistic_indicators);
    ++stats.scored;
    if (*md.score_scsc > config.threshold) {
      md.remove_sentence = true;
      ++stats.removed;
    }
  }
  return stats;
}

}  // namespace debias

#endif  // DEBIAS_STEREOTYPE_HPP_
