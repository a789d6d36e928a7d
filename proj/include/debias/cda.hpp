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

// Counterfactual data augmentation: BaseCDA (coin-flip, one-sided) and
// GC-CDA (prechecked, DR-targeted, LLM-selected and verified).

#ifndef DEBIAS_CDA_HPP_
#define DEBIAS_CDA_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "debias/corpus.hpp"
#include "debias/llm.hpp"
#include "debias/log.hpp"
#include "debias/matcher.hpp"
#include "debias/prompts.hpp"
#include "debias/repbias.hpp"
#include "debias/text.hpp"
#include "debias/wordlist.hpp"
#include "json.hpp"

namespace debias {

class CdaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CdaMode { kBase, kGc };

NLOHMANN_JSON_SERIALIZE_ENUM(CdaMode, {{CdaMode::kBase, "base"}, {CdaMode::kGc, "gc"}})

inline CdaMode parse_cda_mode(std::string_view s) {
  if (s == "base") return CdaMode::kBase;
  if (s == "gc") return CdaMode::kGc;
  throw CdaError("unknown CDA mode '" + std::string(s) + "'");
}

struct CdaConfig {
  CdaMode mode = CdaMode::kGc;
  double substitution_probability = 0.5;
  double llm_selection_ratio = 0.8;
  std::uint64_t rng_seed = 0;
  double target_epsilon = 0.0;

  void validate() const {
    auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!unit(substitution_probability)) throw CdaError("substitution_probability outside [0,1]");
    if (!unit(llm_selection_ratio)) throw CdaError("llm_selection_ratio outside [0,1]");
    if (!(target_epsilon >= 0.0)) throw CdaError("target_epsilon must be >= 0");
  }
};

inline void to_json(nlohmann::json& j, const CdaConfig& c) {
  j = nlohmann::json{{"mode", c.mode},
                     {"substitution_probability", c.substitution_probability},
                     {"llm_selection_ratio", c.llm_selection_ratio},
                     {"rng_seed", c.rng_seed},
                     {"target_epsilon", c.target_epsilon}};
}
inline void from_json(const nlohmann::json& j, CdaConfig& c) {
  c = CdaConfig{};
  if (j.contains("mode")) c.mode = parse_cda_mode(j.at("mode").get<std::string>());
  if (j.contains("substitution_probability")) j.at("substitution_probability").get_to(c.substitution_probability);
  if (j.contains("llm_selection_ratio")) j.at("llm_selection_ratio").get_to(c.llm_selection_ratio);
  if (j.contains("rng_seed")) j.at("rng_seed").get_to(c.rng_seed);
  if (j.contains("target_epsilon")) j.at("target_epsilon").get_to(c.target_epsilon);
  c.validate();
}

// Seeded generator with a platform-independent mapping to [0,1) and to
// indices (std distributions differ between standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t index(std::size_t n) {
    const auto i = static_cast<std::size_t>(unit() * static_cast<double>(n));
    return std::min(i, n - 1);
  }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Prechecks

class PrecheckLists {
 public:
  PrecheckLists(std::vector<std::string> political, std::vector<std::string> historical)
      : political_(std::move(political)), historical_(std::move(historical)) {
    for (auto* list : {&political_, &historical_}) {
      for (auto& k : *list) k = to_lower(trim(k));
      list->erase(std::remove(list->begin(), list->end(), std::string()), list->end());
    }
    for (const auto& k : political_) political_ids_.insert(matcher_.add(k));
    for (const auto& k : historical_) matcher_.add(k);
  }

  static PrecheckLists defaults() {
    return PrecheckLists(
        {"president", "senator", "congressman", "governor", "mayor", "politician",
         "congress", "parliament", "senate", "government", "administration", "election",
         "vote", "voting", "campaign", "politics", "political"},
        {"war", "battle", "revolution", "historical", "history", "century", "assassination",
         "killed", "died", "memorial", "monument", "legacy", "ancient", "medieval", "colonial",
         "civil war", "world war"});
  }

  // Reads political.txt and historical.txt (one keyword per line, '#' starts
  // a comment line).
  static PrecheckLists load(const std::string& dir) {
    return PrecheckLists(read_lines(dir + "/political.txt"), read_lines(dir + "/historical.txt"));
  }

  const std::vector<std::string>& political() const { return political_; }
  const std::vector<std::string>& historical() const { return historical_; }

  // Political keywords are checked before historical ones, then the year
  // pattern.
  std::optional<SkipReason> classify(std::string_view text) const {
    const auto matches = matcher_.match(tokenize_spans(text, matcher_.abbreviations()));
    bool historical = false;
    for (const auto& m : matches) {
      if (political_ids_.count(m.phrase)) return SkipReason::kPolitical;
      historical = true;
    }
    if (historical) return SkipReason::kHistorical;
    static const std::regex year("1[0-9]{3}|20[0-2][0-9]");
    if (std::regex_search(text.begin(), text.end(), year)) return SkipReason::kYear;
    return std::nullopt;
  }

 private:
  static std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CdaError("cannot read keyword list " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
      const auto t = trim(line);
      if (!t.empty() && t.front() != '#') out.emplace_back(t);
    }
    return out;
  }

  std::vector<std::string> political_;
  std::vector<std::string> historical_;
  PhraseMatcher matcher_;
  std::set<std::size_t> political_ids_;
};

// nullopt means the entity may be augmented.
inline std::optional<SkipReason> precheck(const SentenceEntity& entity, CdaMode mode,
                                          const PrecheckLists& lists) {
  if (!entity.metadata.relevant_sentence) return SkipReason::kNotRelevant;
  if (entity.metadata.remove_sentence) return SkipReason::kFlaggedRemoved;
  if (mode == CdaMode::kBase) return std::nullopt;
  return lists.classify(entity.text);
}

// ---------------------------------------------------------------------------
// Plan

struct SubstitutionPlan {
  std::string attribute;
  std::map<std::string, std::uint64_t> excess;
  std::map<std::string, std::uint64_t> deficit;
  std::map<std::string, std::uint64_t> remaining_excess;
  std::map<std::string, std::uint64_t> remaining_deficit;

  bool empty() const { return excess.empty(); }

  std::uint64_t remaining() const {
    std::uint64_t n = 0;
    for (const auto& [g, v] : remaining_excess) n += v;
    return n;
  }

  friend bool operator==(const SubstitutionPlan&, const SubstitutionPlan&) = default;
};

inline void to_json(nlohmann::json& j, const SubstitutionPlan& p) {
  j = nlohmann::json{{"attribute", p.attribute},
                     {"excess", p.excess},
                     {"deficit", p.deficit},
                     {"remaining_excess", p.remaining_excess},
                     {"remaining_deficit", p.remaining_deficit}};
}
inline void from_json(const nlohmann::json& j, SubstitutionPlan& p) {
  j.at("attribute").get_to(p.attribute);
  j.at("excess").get_to(p.excess);
  j.at("deficit").get_to(p.deficit);
  j.at("remaining_excess").get_to(p.remaining_excess);
  j.at("remaining_deficit").get_to(p.remaining_deficit);
}

// Moves the majority group's excess over the balanced share T/M to the other
// groups in equal integer parts; the remainder goes to the lexicographically
// first groups. For two groups this is floor((max - min) / 2).
inline SubstitutionPlan plan_targets(const GroupCounts& counts) {
  SubstitutionPlan plan;
  plan.attribute = counts.attribute;
  const std::uint64_t total = counts.total();
  const std::uint64_t m = counts.counts.size();
  if (total == 0 || m < 2) return plan;
  const std::string major = majority_group(counts);
  const unsigned __int128 scaled = static_cast<unsigned __int128>(counts.counts.at(major)) * m;
  const auto excess = static_cast<std::uint64_t>((scaled - total) / m);
  if (excess == 0) return plan;
  plan.excess[major] = excess;
  const std::uint64_t share = excess / (m - 1);
  std::uint64_t extra = excess % (m - 1);
  for (const auto& [g, n] : counts.counts) {
    if (g == major) continue;
    const std::uint64_t d = share + (extra > 0 ? 1 : 0);
    if (extra > 0) --extra;
    if (d > 0) plan.deficit[g] = d;
  }
  plan.remaining_excess = plan.excess;
  plan.remaining_deficit = plan.deficit;
  return plan;
}

// ---------------------------------------------------------------------------
// Substitution helpers

namespace detail {

inline const WordList* find_list(const std::vector<WordList>& lists, const std::string& group) {
  auto it = std::find_if(lists.begin(), lists.end(),
                         [&](const WordList& w) { return w.group == group; });
  return it == lists.end() ? nullptr : &*it;
}

// Followers that make a preceding "her"/"his" object-like rather than
// possessive.
inline bool non_noun_follower(const std::string& token) {
  static const std::set<std::string> cues = {
      "a", "about", "after", "again", "all", "also", "an", "and", "any", "are", "as", "at",
      "away", "back", "be", "because", "been", "before", "both", "but", "by", "can", "could",
      "did", "do", "does", "down", "every", "for", "from", "had", "has", "have", "he", "her",
      "here", "him", "his", "home", "how", "i", "if", "in", "into", "is", "it", "its", "just",
      "later", "may", "me", "might", "must", "my", "never", "no", "not", "now", "of", "off",
      "on", "once", "or", "our", "out", "over", "she", "should", "so", "some", "soon", "that",
      "the", "their", "them", "then", "there", "these", "they", "this", "those", "through",
      "to", "today", "together", "tomorrow", "tonight", "too", "twice", "under", "until", "up",
      "us", "very", "was", "we", "well", "were", "what", "when", "where", "which", "while",
      "who", "why", "will", "with", "would", "yesterday", "yet", "you", "your"};
  return cues.count(token) > 0;
}

// True when the token after `hit` directly follows it (only whitespace in
// between) and looks like the head of a noun phrase.
inline bool noun_follows(std::string_view text, const std::vector<Token>& tokens,
                         const WordMatcher::Hit& hit) {
  if (hit.last_token >= tokens.size()) return false;
  const Token& next = tokens[hit.last_token];
  for (std::size_t i = hit.end; i < next.begin; ++i) {
    if (!is_space_byte(text[i])) return false;
  }
  return !non_noun_follower(next.text);
}

// Rule-based replacement for the pronouns whose form depends on syntax.
inline std::optional<std::string> pronoun_rule(const std::string& entry, const WordList& to,
                                               bool possessive) {
  if (entry == "her" && to.contains("his") && to.contains("him")) {
    return std::string(possessive ? "his" : "him");
  }
  if (entry == "his" && to.contains("her") && to.contains("hers")) {
    return std::string(possessive ? "her" : "hers");
  }
  return std::nullopt;
}

// Preferred replacement (pronoun rule or counterpart pair) when it belongs to
// the target list.
inline std::optional<std::string> preferred(const WordMatcher::Hit& hit, bool possessive,
                                            const WordList* from, const WordList& to) {
  if (auto p = pronoun_rule(hit.entry, to, possessive)) return p;
  if (from != nullptr) {
    auto it = from->counterpart.find(hit.entry);
    if (it != from->counterpart.end() && to.contains(it->second)) return it->second;
  }
  return std::nullopt;
}

inline std::string splice(std::string_view text,
                          const std::vector<std::pair<const WordMatcher::Hit*, std::string>>& edits) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& [hit, word] : edits) {
    out.append(text.substr(pos, hit->begin - pos));
    out.append(copy_case(text.substr(hit->begin, hit->end - hit->begin), word));
    pos = hit->end;
  }
  out.append(text.substr(pos));
  return out;
}

}  // namespace detail

// Candidate replacements for one occurrence: the preferred form first, then
// the rest of the target list in list order.
inline std::vector<std::string> candidates_for(const WordMatcher::Hit& hit, bool possessive,
                                               const WordList* from, const WordList& to) {
  std::vector<std::string> out;
  if (auto p = detail::preferred(hit, possessive, from, to)) out.push_back(*p);
  for (const auto& w : to.entries) {
    if (out.empty() || w != out.front()) out.push_back(w);
  }
  return out;
}

// BaseCDA on one entity: with probability p every occurrence of `from_group`
// is replaced by its counterpart or a random `to_group` entry.
inline std::optional<std::string> substitute_base(const SentenceEntity& entity,
                                                  const WordMatcher& matcher,
                                                  const std::vector<WordList>& lists,
                                                  const std::string& from_group,
                                                  const std::string& to_group, Rng& rng,
                                                  double probability) {
  const auto tokens = tokenize_spans(entity.text, matcher.abbreviations());
  const auto hits = matcher.find(tokens);
  if (std::none_of(hits.begin(), hits.end(),
                   [&](const auto& h) { return h.group == from_group; })) {
    return std::nullopt;
  }
  if (!(rng.unit() < probability)) return std::nullopt;
  const WordList* from = detail::find_list(lists, from_group);
  const WordList* to = detail::find_list(lists, to_group);
  std::vector<std::pair<const WordMatcher::Hit*, std::string>> edits;
  for (const auto& h : hits) {
    if (h.group != from_group) continue;
    if (to == nullptr || to->entries.empty()) {
      Log::warn("cda: no candidate for '" + h.entry + "' in group " + to_group);
      continue;
    }
    const bool possessive = detail::noun_follows(entity.text, tokens, h);
    if (auto p = detail::preferred(h, possessive, from, *to)) {
      edits.emplace_back(&h, *p);
    } else {
      edits.emplace_back(&h, to->entries[rng.index(to->entries.size())]);
    }
  }
  if (edits.empty()) return std::nullopt;
  return detail::splice(entity.text, edits);
}

// ---------------------------------------------------------------------------
// LLM-assisted selection and verification

enum class Selection { kLlm, kRandom, kFallback };

struct SelectResult {
  std::string word;
  Selection source = Selection::kRandom;
};

inline std::string join_candidates(const std::vector<std::string>& candidates) {
  std::string out;
  for (const auto& c : candidates) {
    if (!out.empty()) out += ", ";
    out += c;
  }
  return out;
}

inline llm::ChatRequest selection_request(const std::string& sentence,
                                          const std::string& original_word,
                                          const std::vector<std::string>& candidates,
                                          const std::string& model,
                                          const PromptCatalog& prompts = PromptCatalog::defaults()) {
  llm::ChatRequest req;
  req.model = model;
  req.temperature = 0.0;
  req.purpose = "cda.select";
  req.messages.push_back({"user", render(prompts.get("cda.select"),
                                         {{"sentence", sentence},
                                          {"original_word", original_word},
                                          {"candidates", join_candidates(candidates)}})});
  return req;
}

// Matches a one-word answer against the candidates, ignoring case, quotes and
// a trailing period.
inline std::optional<std::string> parse_selection(std::string_view answer,
                                                  const std::vector<std::string>& candidates) {
  std::string_view a = trim(answer);
  auto strip = [&](char c) {
    if (!a.empty() && a.back() == c) a.remove_suffix(1);
    if (!a.empty() && a.front() == c) a.remove_prefix(1);
  };
  strip('.');
  strip('"');
  strip('*');
  strip('*');
  a = trim(a);
  const std::string lowered = to_lower(a);
  for (const auto& c : candidates) {
    if (to_lower(c) == lowered) return c;
  }
  return std::nullopt;
}

inline SelectResult select_word(const std::string& sentence, const std::string& original_word,
                                const std::vector<std::string>& candidates,
                                const llm::Endpoint* endpoint, Rng& rng, double ratio,
                                const PromptCatalog& prompts = PromptCatalog::defaults()) {
  if (candidates.empty()) throw CdaError("select_word needs at least one candidate");
  const bool ask = rng.unit() < ratio && endpoint != nullptr && endpoint->client != nullptr;
  if (ask) {
    try {
      const auto answer = endpoint->client->complete(
          selection_request(sentence, original_word, candidates, endpoint->model, prompts));
      if (auto w = parse_selection(answer, candidates)) return {*w, Selection::kLlm};
      Log::warn("cda: selection '" + std::string(trim(answer)) + "' is not a candidate for '" +
                original_word + "'; choosing at random");
    } catch (const llm::LlmError& e) {
      Log::warn(std::string("cda: selection failed (") + e.what() + "); choosing at random");
    }
    return {candidates[rng.index(candidates.size())], Selection::kFallback};
  }
  return {candidates[rng.index(candidates.size())], Selection::kRandom};
}

inline llm::ChatRequest verification_request(const std::string& original,
                                             const std::string& modified,
                                             const std::string& model,
                                             const PromptCatalog& prompts = PromptCatalog::defaults()) {
  llm::ChatRequest req;
  req.model = model;
  req.temperature = 0.0;
  req.purpose = "cda.verify";
  req.messages.push_back({"system", prompts.get("cda.verify")});
  req.messages.push_back({"user", render(prompts.get("cda.verify.query"),
                                         {{"original", original}, {"modified", modified}})});
  return req;
}

// Only the exact answer VALID (surrounding whitespace aside) accepts.
inline bool verify(const std::string& original, const std::string& modified,
                   const llm::Endpoint& endpoint,
                   const PromptCatalog& prompts = PromptCatalog::defaults()) {
  if (endpoint.client == nullptr) return false;
  try {
    const auto answer = endpoint.client->complete(
        verification_request(original, modified, endpoint.model, prompts));
    return trim(answer) == "VALID";
  } catch (const llm::LlmError& e) {
    Log::warn(std::string("cda: verification failed (") + e.what() + ")");
    return false;
  }
}

// ---------------------------------------------------------------------------
// Runs

struct CdaReport {
  std::string attribute;
  CdaMode mode = CdaMode::kGc;
  std::uint64_t seed = 0;
  std::uint64_t eligible = 0;
  std::uint64_t substituted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t over_plan = 0;
  std::map<std::string, std::uint64_t> skipped;
  std::map<std::string, std::uint64_t> selections;  // llm / random / fallback
  SubstitutionPlan plan;
  GroupCounts counts_before;
  GroupCounts counts_after;
  double dr_before = 0.0;
  double dr_after = 0.0;
};

inline void to_json(nlohmann::json& j, const CdaReport& r) {
  j = nlohmann::json{{"attribute", r.attribute},
                     {"mode", r.mode},
                     {"seed", r.seed},
                     {"eligible", r.eligible},
                     {"substituted", r.substituted},
                     {"rejected", r.rejected},
                     {"over_plan", r.over_plan},
                     {"skipped", r.skipped},
                     {"selections", r.selections},
                     {"plan", r.plan},
                     {"counts_before", r.counts_before},
                     {"counts_after", r.counts_after},
                     {"dr_before", r.dr_before},
                     {"dr_after", r.dr_after}};
}
inline void from_json(const nlohmann::json& j, CdaReport& r) {
  j.at("attribute").get_to(r.attribute);
  j.at("mode").get_to(r.mode);
  j.at("seed").get_to(r.seed);
  j.at("eligible").get_to(r.eligible);
  j.at("substituted").get_to(r.substituted);
  j.at("rejected").get_to(r.rejected);
  j.at("over_plan").get_to(r.over_plan);
  j.at("skipped").get_to(r.skipped);
  j.at("selections").get_to(r.selections);
  j.at("plan").get_to(r.plan);
  j.at("counts_before").get_to(r.counts_before);
  j.at("counts_after").get_to(r.counts_after);
  j.at("dr_before").get_to(r.dr_before);
  j.at("dr_after").get_to(r.dr_after);
}

// Group counts over the sentences that survive filtering, matched on the
// augmented text where there is one.
inline GroupCounts effective_counts(const std::vector<SentenceEntity>& entities,
                                    const WordMatcher& matcher) {
  GroupCounts c = GroupCounts::zero(matcher.spec());
  for (const auto& e : entities) {
    if (e.metadata.remove_sentence) continue;
    bool relevant = false;
    if (e.metadata.text_cda) {
      for (const auto& h : matcher.find(*e.metadata.text_cda)) ++c.counts[h.group], relevant = true;
    } else {
      for (const auto& [g, n] : e.metadata.counts_per_group) c.counts[g] += n, relevant |= n > 0;
    }
    if (relevant) ++c.relevant_sentences;
  }
  return c;
}

namespace detail {

inline std::string largest_deficit(const std::map<std::string, std::uint64_t>& deficit) {
  std::string best;
  std::uint64_t n = 0;
  for (const auto& [g, v] : deficit) {
    if (v > n) best = g, n = v;
  }
  return best;
}

}  // namespace detail

struct GcStats {
  std::uint64_t substituted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t over_plan = 0;
  std::map<std::string, std::uint64_t> selections;
};

// GC-CDA over entities whose precheck passed (skip_reason unset and
// relevant). `plan.remaining_*` is decremented as substitutions commit.
inline GcStats substitute_gc(std::vector<SentenceEntity>& entities, SubstitutionPlan& plan,
                             const WordMatcher& matcher, const std::vector<WordList>& lists,
                             const llm::Endpoint& selection, const llm::Endpoint& verification,
                             Rng& rng, const CdaConfig& config,
                             const PromptCatalog& prompts = PromptCatalog::defaults()) {
  GcStats stats;
  if (plan.empty()) return stats;
  GroupCounts running = effective_counts(entities, matcher);
  std::vector<std::size_t> order(entities.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return entity_order(entities[a], entities[b]);
  });
  for (std::size_t idx : order) {
    if (plan.remaining() == 0) break;
    if (config.target_epsilon > 0.0 && compute_dr(running) <= config.target_epsilon) break;
    SentenceEntity& e = entities[idx];
    if (e.metadata.skip_reason || !e.metadata.relevant_sentence || e.metadata.remove_sentence) {
      continue;
    }
    const auto tokens = tokenize_spans(e.text, matcher.abbreviations());
    const auto hits = matcher.find(tokens);
    std::map<std::string, std::uint64_t> per_group;
    for (const auto& h : hits) {
      auto it = plan.remaining_excess.find(h.group);
      if (it != plan.remaining_excess.end() && it->second > 0) ++per_group[h.group];
    }
    if (per_group.empty()) continue;
    const std::string target = detail::largest_deficit(plan.remaining_deficit);
    if (target.empty()) break;
    std::uint64_t n = 0;
    bool fits = true;
    for (const auto& [g, k] : per_group) {
      n += k;
      fits &= k <= plan.remaining_excess.at(g);
    }
    if (!fits || n > plan.remaining_deficit.at(target)) {
      ++stats.over_plan;
      continue;
    }
    const WordList* to = detail::find_list(lists, target);
    if (to == nullptr || to->entries.empty()) {
      Log::warn("cda: no word list for target group " + target);
      break;
    }
    std::vector<std::pair<const WordMatcher::Hit*, std::string>> edits;
    std::map<std::string, std::uint64_t> picks;
    for (const auto& h : hits) {
      if (!per_group.count(h.group)) continue;
      const bool possessive = detail::noun_follows(e.text, tokens, h);
      const auto cands = candidates_for(h, possessive, detail::find_list(lists, h.group), *to);
      const auto choice = select_word(e.text, e.text.substr(h.begin, h.end - h.begin), cands,
                                      &selection, rng, config.llm_selection_ratio, prompts);
      ++picks[choice.source == Selection::kLlm      ? "llm"
              : choice.source == Selection::kRandom ? "random"
                                                    : "fallback"];
      edits.emplace_back(&h, choice.word);
    }
    for (const auto& [k, v] : picks) stats.selections[k] += v;
    std::string modified = detail::splice(e.text, edits);
    if (modified == e.text || !verify(e.text, modified, verification, prompts)) {
      ++stats.rejected;
      continue;
    }
    e.metadata.text_cda = std::move(modified);
    for (const auto& [g, k] : per_group) {
      plan.remaining_excess[g] -= k;
      running.counts[g] -= k;
    }
    plan.remaining_deficit[target] -= n;
    running.counts[target] += n;
    ++stats.substituted;
  }
  return stats;
}

// Full CDA stage: resets text_cda and skip_reason, runs prechecks, plans on
// the post-filter counts and substitutes in the configured mode. Without a
// verification endpoint the selection endpoint verifies too.
inline CdaReport run_cda(std::vector<SentenceEntity>& entities, const WordMatcher& matcher,
                         const std::vector<WordList>& lists, const CdaConfig& config,
                         const PrecheckLists& prechecks, const llm::Endpoint* selection,
                         const llm::Endpoint* verification = nullptr,
                         const PromptCatalog& prompts = PromptCatalog::defaults()) {
  config.validate();
  CdaReport report;
  report.attribute = matcher.spec().attribute;
  report.mode = config.mode;
  report.seed = config.rng_seed;
  for (auto& e : entities) {
    e.metadata.text_cda.reset();
    e.metadata.skip_reason = precheck(e, config.mode, prechecks);
    if (e.metadata.skip_reason) ++report.skipped[to_string(*e.metadata.skip_reason)];
  }
  report.counts_before = effective_counts(entities, matcher);
  report.dr_before = compute_dr(report.counts_before);
  report.plan = plan_targets(report.counts_before);
  // Eligible: unskipped sentences holding a word of an over-represented group.
  for (const auto& e : entities) {
    if (e.metadata.skip_reason) continue;
    for (const auto& [g, n] : e.metadata.counts_per_group) {
      if (n > 0 && report.plan.excess.count(g)) {
        ++report.eligible;
        break;
      }
    }
  }
  Rng rng(config.rng_seed);
  if (config.mode == CdaMode::kBase) {
    const std::string from = majority_group(report.counts_before);
    const std::string to = minority_group(report.counts_before);
    if (!report.plan.empty() && from != to) {
      std::vector<std::size_t> order(entities.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return entity_order(entities[a], entities[b]);
      });
      for (std::size_t idx : order) {
        auto& e = entities[idx];
        if (e.metadata.skip_reason) continue;
        auto text = substitute_base(e, matcher, lists, from, to, rng,
                                    config.substitution_probability);
        if (text && *text != e.text) {
          e.metadata.text_cda = std::move(*text);
          ++report.substituted;
        }
      }
    }
  } else {
    if (verification == nullptr) verification = selection;
    if (selection == nullptr || selection->client == nullptr || verification->client == nullptr) {
      throw CdaError("GC-CDA needs an LLM endpoint");
    }
    const auto stats = substitute_gc(entities, report.plan, matcher, lists, *selection,
                                     *verification, rng, config, prompts);
    report.substituted = stats.substituted;
    report.rejected = stats.rejected;
    report.over_plan = stats.over_plan;
    report.selections = stats.selections;
  }
  report.counts_after = effective_counts(entities, matcher);
  report.dr_after = compute_dr(report.counts_after);
  return report;
}

}  // namespace debias

#endif  // DEBIAS_CDA_HPP_
