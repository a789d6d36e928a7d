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

// Linguistic stereotype indicators (social category and stereotype
// communication scheme) produced by the assessment step.

#ifndef DEBIAS_INDICATORS_HPP_
#define DEBIAS_INDICATORS_HPP_

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "debias/text.hpp"
#include "json.hpp"

namespace debias {

inline constexpr std::string_view kNotApplicable = "not-applicable";

enum class TargetType { kSpecific, kGeneric, kNotApplicable };
enum class Connotation { kNegative, kNeutral, kPositive, kNotApplicable };
enum class GramForm { kNoun, kOther, kNotApplicable };
enum class LingForm { kGeneric, kSubset, kIndividual, kNotApplicable };
enum class Situation { kSituational, kEnduring, kOther, kNotApplicable };
enum class Evaluation { kNegative, kNeutral, kPositive, kNotApplicable };
enum class Generalization { kAbstract, kConcrete, kNotApplicable };

template <typename E>
struct IndicatorTraits;

#define DEBIAS_INDICATOR_TRAITS(Enum, field_name, ...)                  \
  template <>                                                          \
  struct IndicatorTraits<Enum> {                                       \
    static constexpr std::string_view kField = field_name;             \
    static constexpr auto kNames = std::to_array<std::string_view>(    \
        {__VA_ARGS__});                                                \
  };

DEBIAS_INDICATOR_TRAITS(TargetType, "target_type", "specific", "generic",
                        kNotApplicable)
DEBIAS_INDICATOR_TRAITS(Connotation, "connotation", "negative", "neutral",
                        "positive", kNotApplicable)
DEBIAS_INDICATOR_TRAITS(GramForm, "gram_form", "noun", "other", kNotApplicable)
DEBIAS_INDICATOR_TRAITS(LingForm, "ling_form", "generic", "subset",
                        "individual", kNotApplicable)
DEBIAS_INDICATOR_TRAITS(Situation, "situation", "situational", "enduring",
                        "other", kNotApplicable)
DEBIAS_INDICATOR_TRAITS(Evaluation, "situation_evaluation", "negative",
                        "neutral", "positive", kNotApplicable)
DEBIAS_INDICATOR_TRAITS(Generalization, "generalization", "abstract",
                        "concrete", kNotApplicable)

#undef DEBIAS_INDICATOR_TRAITS

template <typename E>
constexpr std::string_view name_of(E value) {
  return IndicatorTraits<E>::kNames[static_cast<std::size_t>(value)];
}

template <typename E>
constexpr std::size_t value_count() {
  return IndicatorTraits<E>::kNames.size();
}

template <typename E>
std::vector<E> all_values() {
  std::vector<E> out;
  for (std::size_t i = 0; i < value_count<E>(); ++i) {
    out.push_back(static_cast<E>(i));
  }
  return out;
}

namespace detail {

// Collapses the long answer forms used in prompts ("generic target",
// "enduring characteristics", "situational behaviour") to short names.
inline std::string canonical_answer(std::string_view raw) {
  std::string s = to_lower(trim(raw));
  std::replace(s.begin(), s.end(), '_', '-');
  if (s == "n/a" || s == "not applicable" || s == "na") return "not-applicable";
  for (std::string_view suffix :
       {" target", " characteristics", " characteristic", " behaviour",
        " behavior"}) {
    if (s.size() > suffix.size() &&
        s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
      s.resize(s.size() - suffix.size());
      break;
    }
  }
  return s;
}

}  // namespace detail

// Parses an indicator answer; nullopt when the value is not admitted.
template <typename E>
std::optional<E> parse_indicator(std::string_view raw) {
  const std::string s = detail::canonical_answer(raw);
  const auto& names = IndicatorTraits<E>::kNames;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  return std::nullopt;
}

struct IndicatorRecord {
  bool has_category_label = false;
  std::string full_label{kNotApplicable};
  TargetType target_type = TargetType::kNotApplicable;
  Connotation connotation = Connotation::kNotApplicable;
  GramForm gram_form = GramForm::kNotApplicable;
  LingForm ling_form = LingForm::kNotApplicable;
  std::string information{kNotApplicable};
  Situation situation = Situation::kNotApplicable;
  Evaluation situation_evaluation = Evaluation::kNotApplicable;
  Generalization generalization = Generalization::kNotApplicable;

  friend bool operator==(const IndicatorRecord&,
                         const IndicatorRecord&) = default;

  // Applies the not-applicable cascade: no label blanks everything; missing
  // information blanks the situation; a situation of `other` blanks its
  // evaluation and generalization.
  void normalize() {
    if (!has_category_label) {
      *this = IndicatorRecord{};
      return;
    }
    if (information == kNotApplicable) situation = Situation::kNotApplicable;
    if (situation == Situation::kOther ||
        situation == Situation::kNotApplicable) {
      situation_evaluation = Evaluation::kNotApplicable;
      generalization = Generalization::kNotApplicable;
    }
  }

  // (indicator, value) pairs fed to the linear score model.
  std::vector<std::pair<std::string_view, std::string_view>> features() const {
    return {
        {"has_category_label", has_category_label ? "yes" : "no"},
        {IndicatorTraits<TargetType>::kField, name_of(target_type)},
        {IndicatorTraits<Connotation>::kField, name_of(connotation)},
        {IndicatorTraits<GramForm>::kField, name_of(gram_form)},
        {IndicatorTraits<LingForm>::kField, name_of(ling_form)},
        {IndicatorTraits<Situation>::kField, name_of(situation)},
        {IndicatorTraits<Evaluation>::kField, name_of(situation_evaluation)},
        {IndicatorTraits<Generalization>::kField, name_of(generalization)},
    };
  }
};

// All scored indicators with their admitted values, in feature order.
inline std::vector<std::pair<std::string, std::vector<std::string>>>
indicator_schema() {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  out.push_back({"has_category_label", {"yes", "no"}});
  auto add = [&out]<typename E>(E) {
    std::vector<std::string> names;
    for (auto n : IndicatorTraits<E>::kNames) names.emplace_back(n);
    out.emplace_back(std::string(IndicatorTraits<E>::kField), std::move(names));
  };
  add(TargetType{});
  add(Connotation{});
  add(GramForm{});
  add(LingForm{});
  add(Situation{});
  add(Evaluation{});
  add(Generalization{});
  return out;
}

inline void to_json(nlohmann::json& j, const IndicatorRecord& r) {
  j = nlohmann::json{
      {"has_category_label", r.has_category_label ? "yes" : "no"},
      {"full_label", r.full_label},
      {"target_type", name_of(r.target_type)},
      {"connotation", name_of(r.connotation)},
      {"gram_form", name_of(r.gram_form)},
      {"ling_form", name_of(r.ling_form)},
      {"information", r.information},
      {"situation", name_of(r.situation)},
      {"situation_evaluation", name_of(r.situation_evaluation)},
      {"generalization", name_of(r.generalization)},
  };
}

class IndicatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename E>
E indicator_field(const nlohmann::json& j) {
  const auto key = std::string(IndicatorTraits<E>::kField);
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw IndicatorError("missing field " + key);
  }
  const auto raw = j.at(key).get<std::string>();
  auto parsed = parse_indicator<E>(raw);
  if (!parsed) throw IndicatorError("invalid value '" + raw + "' for " + key);
  return *parsed;
}

inline std::string text_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return std::string(kNotApplicable);
  const auto& v = j.at(key);
  return v.is_string() ? v.get<std::string>() : v.dump();
}

}  // namespace detail

// Strict parse: every enum must carry an admitted value. Throws
// IndicatorError naming the offending field.
inline IndicatorRecord indicator_record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw IndicatorError("indicator payload is not an object");
  if (!j.contains("has_category_label") ||
      !j.at("has_category_label").is_string()) {
    throw IndicatorError("missing field has_category_label");
  }
  const std::string label = to_lower(trim(j.at("has_category_label").get<std::string>()));
  if (label != "yes" && label != "no") {
    throw IndicatorError("invalid value '" + label + "' for has_category_label");
  }
  IndicatorRecord r;
  r.has_category_label = label == "yes";
  r.full_label = detail::text_field(j, "full_label");
  r.target_type = detail::indicator_field<TargetType>(j);
  r.connotation = detail::indicator_field<Connotation>(j);
  r.gram_form = detail::indicator_field<GramForm>(j);
  r.ling_form = detail::indicator_field<LingForm>(j);
  r.information = detail::text_field(j, "information");
  if (detail::canonical_answer(r.information) == kNotApplicable) {
    r.information = std::string(kNotApplicable);
  }
  r.situation = detail::indicator_field<Situation>(j);
  r.situation_evaluation = detail::indicator_field<Evaluation>(j);
  r.generalization = detail::indicator_field<Generalization>(j);
  r.normalize();
  return r;
}

inline void from_json(const nlohmann::json& j, IndicatorRecord& r) {
  r = indicator_record_from_json(j);
}

}  // namespace debias

#endif  // DEBIAS_INDICATORS_HPP_
