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

// Deterministic rule-based stand-in for the chat endpoint. The committed
// fixture transcripts are recorded from it, and tests use it directly.

#ifndef DEBIAS_TESTS_FIXTURE_ORACLE_HPP_
#define DEBIAS_TESTS_FIXTURE_ORACLE_HPP_

#include <map>
#include <string>
#include <vector>

#include "debias/corpus.hpp"
#include "debias/llm.hpp"
#include "fake_llm.hpp"
#include "json.hpp"

namespace debias::testing_support {

inline constexpr const char* kRainSentence = "It always rains in London.";
inline constexpr const char* kRainContext = "He traveled to England.";
inline constexpr const char* kYoungWomenSentence =
    "Young women are usually too emotional to make a decision!";
inline constexpr const char* kYoungWomenContext = "She cried a lot, and didn't know what to do.";
inline constexpr const char* kScienceSentence =
    "Women who do stick it out in science are fighting harder than their male peers just to do "
    "their work.";
inline constexpr const char* kScienceContext =
    "Its invitations do send an implied message: the company doesn't value female voices.";
inline constexpr const char* kWivesSentence =
    "Men on the other hand just have to sit while their wives cook meals for them.";
inline constexpr const char* kChildlessSentence =
    "In each of these states the percentage of childless women exceeds 55 %.";
inline constexpr const char* kOldWomenSentence =
    "The first thought that comes to mind are those old colored women with their boobies hanging "
    "down to their knees.";

inline std::string detection_answer(const std::string& label, const std::string& information) {
  if (label.empty()) {
    return R"({"has_category_label":"no", "full_label":"not-applicable", "beliefs_expectancies":"not-applicable", "information":"not-applicable", "behavior_features_traits":"not-applicable", "stereotype":"no"})";
  }
  return nlohmann::json{{"has_category_label", "yes"},   {"full_label", label},
                        {"beliefs_expectancies", "yes"}, {"information", information},
                        {"behavior_features_traits", "yes"}, {"stereotype", "yes"}}
      .dump();
}

inline std::string assessment_answer(const std::string& label, const std::string& target,
                                     const std::string& connotation, const std::string& ling,
                                     const std::string& information, const std::string& situation,
                                     const std::string& evaluation,
                                     const std::string& generalization) {
  return nlohmann::json{{"has_category_label", "yes"},   {"full_label", label},
                        {"target_type", target},         {"connotation", connotation},
                        {"gram_form", "noun"},           {"ling_form", ling},
                        {"information", information},    {"situation", situation},
                        {"situation_evaluation", evaluation}, {"generalization", generalization}}
      .dump();
}

// Completions for the occupation probe, indexed by run % 5. The first half
// of the templates draws from the first pool.
inline const std::vector<std::string>& soct_pool(bool female_half) {
  static const std::vector<std::string> first = {
      "woman who cares for every patient.", "kind woman with a warm smile.",
      "person who helps others.", "man with a gentle heart.", "friend to her and to him."};
  static const std::vector<std::string> second = {
      "man who builds great things.", "skilled man.", "woman of science and reason.",
      "true professional.", "man at the top of his field."};
  return female_half ? first : second;
}

// Repair turns append user messages, so the query lives in the first one.
inline const std::string& first_user_message(const llm::ChatRequest& req) {
  for (const auto& m : req.messages) {
    if (m.role == "user") return m.content;
  }
  static const std::string kEmpty;
  return kEmpty;
}

class FixtureOracle : public ScriptedClient {
 public:
  FixtureOracle() {
    on("stereotype.detect", [](const llm::ChatRequest& r) {
      const auto sentence = field_after(first_user_message(r), "Sentence: ");
      static const std::map<std::string, std::pair<std::string, std::string>> known = {
          {kYoungWomenSentence, {"young women", "are usually too emotional to make a decision"}},
          {kScienceSentence,
           {"women", "are fighting harder than their male peers just to do their work"}},
          {"Men are bad at listening.", {"men", "are bad at listening"}},
          {"Boys will be boys, he said.", {"boys", "will be boys"}},
      };
      auto it = known.find(sentence);
      return it == known.end() ? detection_answer("", "")
                               : detection_answer(it->second.first, it->second.second);
    });
    on("stereotype.assess", [](const llm::ChatRequest& r) -> std::string {
      const auto sentence = field_after(first_user_message(r), "Sentence: ");
      if (sentence == kWivesSentence) {
        return assessment_answer("wifes", "generic target", "neutral", "generic", "cook meals",
                                 "enduring characteristics", "neutral", "concrete");
      }
      if (sentence == kChildlessSentence) {
        return assessment_answer("childless women", "generic target", "neutral", "generic",
                                 "not-applicable", "not-applicable", "not-applicable",
                                 "not-applicable");
      }
      if (sentence == kOldWomenSentence) {
        return assessment_answer("those old colored women", "specific target", "neutral",
                                 "subset", "with their boobies hanging down to their knees",
                                 "enduring characteristics", "negative", "concrete");
      }
      if (sentence == kYoungWomenSentence) {
        return assessment_answer("young women", "generic target", "negative", "generic",
                                 "are usually too emotional", "enduring characteristics",
                                 "negative", "abstract");
      }
      if (sentence == "Men are bad at listening.") {
        return assessment_answer("men", "generic target", "positive", "subset",
                                 "are bad at listening", "situational behaviour", "positive",
                                 "concrete");
      }
      if (sentence == "Boys will be boys, he said.") {
        return assessment_answer("boys", "bogus", "neutral", "generic", "will be boys",
                                 "enduring characteristics", "neutral", "abstract");
      }
      return assessment_answer("people", "generic target", "neutral", "generic",
                               "not-applicable", "not-applicable", "not-applicable",
                               "not-applicable");
    });
    on("cda.select", [](const llm::ChatRequest& r) {
      const auto line = field_after(last_user_message(r), "**Candidates**: ");
      return line.substr(0, line.find(','));
    });
    on("cda.verify", [](const llm::ChatRequest& r) {
      const auto original = field_after(last_user_message(r), "Sentence 1 (Original): ");
      return std::string(original.find("beard") == std::string::npos ? "VALID" : "INVALID");
    });
    on("soct.complete", [](const llm::ChatRequest& r) {
      // purpose: soct.complete:t<template>:run<run>
      const auto t = std::stoul(r.purpose.substr(r.purpose.find(":t") + 2));
      const auto run = std::stoul(r.purpose.substr(r.purpose.find(":run") + 4));
      return soct_pool(t < 10)[run % 5];
    });
  }
};

// Six small documents, male-heavy, with sentences that hit every pipeline
// branch: stereotypes above and below threshold, a failed assessment,
// political and year prechecks and a rejected verification.
inline std::vector<Document> e2e_documents() {
  return {
      {"d1", "The man went to the market. He bought apples for his mother. "
             "The president said he would visit."},
      {"d2", std::string(kYoungWomenSentence) + " She cried a lot. " + kRainSentence},
      {"d3", "My father and my uncle fixed the car. The boy played outside while his brother "
             "slept. In 1984 the king built a bridge."},
      {"d4", "The lady is tall. The man is tall. Men are bad at listening."},
      {"d5", "The sky is blue today. The waiter brought soup to the gentleman. "
             "The old man shaved his beard."},
      {"d6", "Dr. Smith met the duke yesterday. The nephew and the groom danced.\n\n"
             "Boys will be boys, he said."},
  };
}

}  // namespace debias::testing_support

#endif  // DEBIAS_TESTS_FIXTURE_ORACLE_HPP_
