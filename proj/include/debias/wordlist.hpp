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

// Word lists of category labels: data model, LLM-assisted generation,
// frequency filtering and reviewer decisions.

#ifndef DEBIAS_WORDLIST_HPP_
#define DEBIAS_WORDLIST_HPP_

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "debias/corpus.hpp"
#include "debias/llm.hpp"
#include "debias/log.hpp"
#include "debias/matcher.hpp"
#include "debias/parallel.hpp"
#include "debias/prompts.hpp"
#include "debias/text.hpp"
#include "json.hpp"

namespace debias {

class WordListError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AttributeSpec {
  std::string attribute;
  std::vector<std::string> groups;

  void validate() const {
    if (attribute.empty()) throw WordListError("attribute name is empty");
    if (groups.size() < 2) {
      throw WordListError("attribute " + attribute + " needs at least two groups");
    }
    std::set<std::string> seen;
    for (const auto& g : groups) {
      if (g.empty()) throw WordListError("empty group name in " + attribute);
      if (!seen.insert(g).second) throw WordListError("duplicate group " + g);
    }
  }

  std::size_t size() const { return groups.size(); }
};

// Built-in group layouts for the shipped word lists.
inline std::optional<AttributeSpec> builtin_spec(const std::string& attribute) {
  if (attribute == "gender") return AttributeSpec{"gender", {"female", "male"}};
  if (attribute == "age") return AttributeSpec{"age", {"young", "middle", "old"}};
  if (attribute == "religion") {
    return AttributeSpec{"religion",
                         {"buddhism", "christianity", "hinduism", "islam", "judaism"}};
  }
  return std::nullopt;
}

inline void to_json(nlohmann::json& j, const AttributeSpec& s) {
  j = nlohmann::json{{"attribute", s.attribute}, {"groups", s.groups}};
}
inline void from_json(const nlohmann::json& j, AttributeSpec& s) {
  j.at("attribute").get_to(s.attribute);
  j.at("groups").get_to(s.groups);
}

struct WordList {
  std::string attribute;
  std::string group;
  std::vector<std::string> entries;
  // entry -> entry of another group's list (gender-style pairs)
  std::map<std::string, std::string> counterpart;

  bool contains(const std::string& word) const {
    return std::find(entries.begin(), entries.end(), word) != entries.end();
  }

  friend bool operator==(const WordList&, const WordList&) = default;
};

inline void to_json(nlohmann::json& j, const WordList& w) {
  j = nlohmann::json{{"attribute", w.attribute}, {"group", w.group}, {"entries", w.entries}};
  if (!w.counterpart.empty()) j["counterpart"] = w.counterpart;
}
inline void from_json(const nlohmann::json& j, WordList& w) {
  j.at("attribute").get_to(w.attribute);
  j.at("group").get_to(w.group);
  j.at("entries").get_to(w.entries);
  w.counterpart.clear();
  if (j.contains("counterpart")) j.at("counterpart").get_to(w.counterpart);
}

// Checks entry uniqueness and that counterpart maps are injective and point
// at entries of some other list.
inline void validate_lists(const std::vector<WordList>& lists) {
  for (const auto& wl : lists) {
    std::set<std::string> seen;
    for (const auto& e : wl.entries) {
      if (e.empty()) throw WordListError("empty entry in " + wl.group);
      if (!seen.insert(e).second) {
        throw WordListError("duplicate entry '" + e + "' in " + wl.group);
      }
    }
    std::set<std::string> targets;
    for (const auto& [from, to] : wl.counterpart) {
      if (!seen.count(from)) {
        throw WordListError("counterpart key '" + from + "' not in " + wl.group);
      }
      if (!targets.insert(to).second) {
        throw WordListError("counterpart map of " + wl.group + " is not injective at '" +
                            to + "'");
      }
      const bool found = std::any_of(lists.begin(), lists.end(), [&](const WordList& o) {
        return o.group != wl.group && o.contains(to);
      });
      if (!found) {
        throw WordListError("counterpart '" + to + "' of '" + from +
                            "' is not in any other list");
      }
    }
  }
}

inline WordList load_wordlist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw WordListError("cannot open word list " + path);
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw WordListError("word list " + path + " is not valid JSON");
  try {
    return j.get<WordList>();
  } catch (const nlohmann::json::exception& e) {
    throw WordListError("word list " + path + ": " + e.what());
  }
}

inline void save_wordlist(const std::string& path, const WordList& list) {
  std::ofstream out(path);
  if (!out) throw WordListError("cannot write word list " + path);
  out << nlohmann::json(list).dump(2) << '\n';
}

// Path of a group's list: <dir>/<group>.json, or <dir>/<attribute>/<group>.json.
inline std::filesystem::path wordlist_path(const std::filesystem::path& dir,
                                           const AttributeSpec& spec,
                                           const std::string& group) {
  auto direct = dir / (group + ".json");
  if (std::filesystem::exists(direct)) return direct;
  return dir / spec.attribute / (group + ".json");
}

inline std::vector<WordList> load_wordlists(const std::filesystem::path& dir,
                                            const AttributeSpec& spec) {
  spec.validate();
  std::vector<WordList> lists;
  for (const auto& g : spec.groups) {
    const auto path = wordlist_path(dir, spec, g);
    if (!std::filesystem::exists(path)) {
      throw WordListError("missing word list for group " + g + " (" + path.string() + ")");
    }
    auto wl = load_wordlist(path.string());
    if (wl.group != g || wl.attribute != spec.attribute) {
      throw WordListError(path.string() + " holds " + wl.attribute + "/" + wl.group +
                          ", expected " + spec.attribute + "/" + g);
    }
    lists.push_back(std::move(wl));
  }
  validate_lists(lists);
  return lists;
}

// ---------------------------------------------------------------------------
// Generation

enum class SelectionMode { kFrequency, kGeneration };

NLOHMANN_JSON_SERIALIZE_ENUM(SelectionMode, {{SelectionMode::kFrequency, "frequency"},
                                             {SelectionMode::kGeneration, "generation"}})

struct FewShot {
  std::string group;
  std::vector<std::string> words;
};

struct FewShotSet {
  std::vector<FewShot> positive;
  std::vector<FewShot> negative;
};

inline void from_json(const nlohmann::json& j, FewShot& f) {
  j.at("group").get_to(f.group);
  j.at("words").get_to(f.words);
}
inline void to_json(nlohmann::json& j, const FewShot& f) {
  j = nlohmann::json{{"group", f.group}, {"words", f.words}};
}
inline void from_json(const nlohmann::json& j, FewShotSet& f) {
  f.positive = j.value("positive", std::vector<FewShot>{});
  f.negative = j.value("negative", std::vector<FewShot>{});
}
inline void to_json(nlohmann::json& j, const FewShotSet& f) {
  j = nlohmann::json{{"positive", f.positive}, {"negative", f.negative}};
}

struct GenerationParams {
  int runs = 5;
  int words_per_run = 300;
  int validation_count = 100;
  SelectionMode selection_mode = SelectionMode::kFrequency;
  // Keyed by group; the key "*" applies to groups without their own set.
  std::map<std::string, FewShotSet> few_shots;

  void validate() const {
    if (runs < 1 || words_per_run < 1 || validation_count < 1) {
      throw WordListError("runs, words_per_run and validation_count must be positive");
    }
    if (static_cast<long>(validation_count) > static_cast<long>(runs) * words_per_run) {
      throw WordListError("validation_count exceeds runs * words_per_run");
    }
  }

  const FewShotSet* shots_for(const std::string& group) const {
    auto it = few_shots.find(group);
    if (it == few_shots.end()) it = few_shots.find("*");
    return it == few_shots.end() ? nullptr : &it->second;
  }
};

// Every field is optional; missing ones keep their defaults.
inline void from_json(const nlohmann::json& j, GenerationParams& p) {
  p = GenerationParams{};
  p.runs = j.value("runs", p.runs);
  p.words_per_run = j.value("words_per_run", p.words_per_run);
  p.validation_count = j.value("validation_count", p.validation_count);
  if (j.contains("selection_mode")) j.at("selection_mode").get_to(p.selection_mode);
  if (j.contains("few_shots")) j.at("few_shots").get_to(p.few_shots);
  p.validate();
}
inline void to_json(nlohmann::json& j, const GenerationParams& p) {
  j = nlohmann::json{{"runs", p.runs},
                     {"words_per_run", p.words_per_run},
                     {"validation_count", p.validation_count},
                     {"selection_mode", p.selection_mode},
                     {"few_shots", p.few_shots}};
}

namespace detail {

inline std::string render_examples(const std::string& tmpl, const std::string& attribute,
                                   const std::vector<FewShot>& shots) {
  std::string out;
  for (const auto& s : shots) {
    out += render(tmpl, {{"attribute", attribute},
                         {"group", s.group},
                         {"answer", nlohmann::json(s.words).dump()}});
    out += '\n';
  }
  return out;
}

// Response must hold a JSON array of strings (possibly inside an object).
inline llm::Parsed<std::vector<std::string>> parse_word_array(const std::string& text) {
  auto j = llm::extract_json(text);
  if (!j) return std::string("no JSON array found");
  if (j->is_object()) {
    for (auto& [key, value] : j->items()) {
      if (value.is_array()) {
        j = value;
        break;
      }
    }
  }
  if (!j->is_array()) return std::string("payload is not a JSON array");
  std::vector<std::string> words;
  for (const auto& v : *j) {
    if (!v.is_string()) return std::string("array holds a non-string value");
    words.push_back(v.get<std::string>());
  }
  return words;
}

// Lowercase, trim and drop duplicates while keeping first occurrences.
inline void append_unique(std::vector<std::string>& out, std::unordered_set<std::string>& seen,
                          const std::vector<std::string>& words) {
  for (const auto& w : words) {
    std::string norm = to_lower(trim(w));
    if (norm.empty()) continue;
    if (seen.insert(norm).second) out.push_back(std::move(norm));
  }
}

}  // namespace detail

inline llm::ChatRequest generation_request(const AttributeSpec& spec, const std::string& group,
                                           const GenerationParams& params, int run,
                                           const std::string& model,
                                           const PromptCatalog& prompts = PromptCatalog::defaults()) {
  const FewShotSet* shots = params.shots_for(group);
  const auto& example = prompts.get("wordlist.example");
  const std::string positives =
      shots ? detail::render_examples(example, spec.attribute, shots->positive) : "";
  const std::string negatives =
      shots ? detail::render_examples(example, spec.attribute, shots->negative) : "";
  llm::ChatRequest req;
  req.model = model;
  req.messages = {
      {"system", prompts.get("wordlist.task")},
      {"user", render(prompts.get("wordlist.query"),
                      {{"positive_examples", positives},
                       {"negative_examples", negatives},
                       {"count", std::to_string(params.words_per_run)},
                       {"attribute", spec.attribute},
                       {"group", group}})}};
  req.purpose = "wordlist.generate:" + spec.attribute + ":" + group + ":run" + std::to_string(run);
  return req;
}

// r independent runs per group, lowercased and de-duplicated in run order.
inline std::map<std::string, std::vector<std::string>> generate_raw(
    const AttributeSpec& spec, const GenerationParams& params, const llm::Endpoint& endpoint,
    const PromptCatalog& prompts = PromptCatalog::defaults()) {
  spec.validate();
  params.validate();
  const std::size_t runs = static_cast<std::size_t>(params.runs);
  std::vector<llm::Parsed<std::vector<std::string>>> results(spec.size() * runs,
                                                             std::string("not run"));
  parallel_for(results.size(), endpoint.parallelism, [&](std::size_t i) {
    const auto& group = spec.groups[i / runs];
    const int run = static_cast<int>(i % runs);
    results[i] = llm::ask_with_repair<std::vector<std::string>>(
        *endpoint.client, generation_request(spec, group, params, run, endpoint.model, prompts),
        detail::parse_word_array);
  });

  std::map<std::string, std::vector<std::string>> out;
  for (std::size_t g = 0; g < spec.size(); ++g) {
    const auto& group = spec.groups[g];
    auto& words = out[group];
    std::unordered_set<std::string> seen;
    std::size_t failed = 0;
    for (std::size_t r = 0; r < runs; ++r) {
      const auto& res = results[g * runs + r];
      if (const auto* err = std::get_if<std::string>(&res)) {
        ++failed;
        Log::warn("wordlist: " + group + " run " + std::to_string(r) + " skipped: " + *err);
        continue;
      }
      detail::append_unique(words, seen, std::get<0>(res));
    }
    if (failed == runs) {
      throw WordListError("all generation runs failed for group " + group);
    }
    if (words.empty()) Log::warn("wordlist: no words generated for group " + group);
  }
  return out;
}

struct ExpandedLists {
  std::map<std::string, std::vector<std::string>> words;
  std::map<std::string, std::map<std::string, std::string>> counterpart;
};

namespace detail {

struct CompletenessProposal {
  std::string plural;
  std::map<std::string, std::pair<std::string, std::string>> counterparts;
};

inline llm::Parsed<CompletenessProposal> parse_completeness(const std::string& text) {
  auto j = llm::extract_json(text);
  if (!j || !j->is_object()) return std::string("no JSON object found");
  CompletenessProposal p;
  if (j->contains("plural")) {
    if (!(*j)["plural"].is_string()) return std::string("plural is not a string");
    p.plural = (*j)["plural"].get<std::string>();
  }
  if (j->contains("counterparts")) {
    const auto& cps = (*j)["counterparts"];
    if (!cps.is_object()) return std::string("counterparts is not an object");
    for (const auto& [group, value] : cps.items()) {
      std::vector<std::string> pair;
      if (value.is_string()) {
        pair.push_back(value.get<std::string>());
      } else if (value.is_array()) {
        for (const auto& v : value) {
          if (!v.is_string()) return std::string("counterpart entries must be strings");
          pair.push_back(v.get<std::string>());
        }
      } else {
        return std::string("counterpart for " + group + " has the wrong type");
      }
      if (pair.empty()) continue;
      p.counterparts[group] = {pair[0], pair.size() > 1 ? pair[1] : std::string()};
    }
  }
  return p;
}

}  // namespace detail

// Adds LLM-proposed plurals and cross-group counterparts. Failed lookups leave
// the word's lists untouched.
inline ExpandedLists expand_completeness(
    const AttributeSpec& spec, const std::map<std::string, std::vector<std::string>>& lists,
    const llm::Endpoint& endpoint, const PromptCatalog& prompts = PromptCatalog::defaults()) {
  spec.validate();
  struct Item {
    std::string group;
    std::string word;
  };
  std::vector<Item> items;
  for (const auto& g : spec.groups) {
    auto it = lists.find(g);
    if (it == lists.end()) continue;
    for (const auto& w : it->second) items.push_back({g, w});
  }
  std::string group_names;
  for (const auto& g : spec.groups) {
    if (!group_names.empty()) group_names += ", ";
    group_names += g;
  }
  std::vector<llm::Parsed<detail::CompletenessProposal>> proposals(items.size(),
                                                                   std::string("not run"));
  parallel_for(items.size(), endpoint.parallelism, [&](std::size_t i) {
    llm::ChatRequest req;
    req.model = endpoint.model;
    req.messages = {{"user", render(prompts.get("wordlist.completeness"),
                                    {{"attribute", spec.attribute},
                                     {"groups", group_names},
                                     {"group", items[i].group},
                                     {"word", items[i].word}})}};
    req.purpose = "wordlist.complete:" + spec.attribute + ":" + items[i].group;
    proposals[i] = llm::ask_with_repair<detail::CompletenessProposal>(
        *endpoint.client, std::move(req), detail::parse_completeness);
  });

  ExpandedLists out;
  std::map<std::string, std::unordered_set<std::string>> seen;
  for (const auto& g : spec.groups) {
    auto it = lists.find(g);
    out.words[g] = it == lists.end() ? std::vector<std::string>{} : it->second;
    out.counterpart[g];
    seen[g].insert(out.words[g].begin(), out.words[g].end());
  }
  std::map<std::string, std::set<std::string>> targets;
  const auto add = [&](const std::string& group, const std::string& raw) -> std::string {
    std::string w = to_lower(trim(raw));
    if (w.empty()) return w;
    if (seen[group].insert(w).second) out.words[group].push_back(w);
    return w;
  };
  const auto link = [&](const std::string& ga, const std::string& a, const std::string& gb,
                        const std::string& b) {
    if (a.empty() || b.empty()) return;
    auto& map = out.counterpart[ga];
    if (map.count(a) || targets[ga].count(b)) return;
    map[a] = b;
    targets[ga].insert(b);
  };
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& [group, word] = items[i];
    if (const auto* err = std::get_if<std::string>(&proposals[i])) {
      Log::warn("wordlist: completeness lookup failed for '" + word + "': " + *err);
      continue;
    }
    const auto& p = std::get<0>(proposals[i]);
    const std::string plural = add(group, p.plural);
    for (const auto& other : spec.groups) {
      auto cp = p.counterparts.find(other);
      if (other == group || cp == p.counterparts.end()) continue;
      const std::string c = add(other, cp->second.first);
      const std::string c_plural = add(other, cp->second.second);
      link(group, word, other, c);
      link(other, c, group, word);
      if (!plural.empty() && plural != word) {
        link(group, plural, other, c_plural);
        link(other, c_plural, group, plural);
      }
    }
  }
  for (auto it = out.counterpart.begin(); it != out.counterpart.end();) {
    it = it->second.empty() ? out.counterpart.erase(it) : std::next(it);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frequencies and selection

// Token-level occurrence count of each word over the corpus, case-insensitive;
// multi-token words count contiguous token runs.
inline std::map<std::string, std::uint64_t> compute_frequencies(
    const std::vector<std::string>& words, const std::vector<Document>& corpus,
    const Abbreviations& abbreviations = Abbreviations(), std::size_t workers = 1) {
  PhraseMatcher matcher(abbreviations);
  std::vector<std::size_t> ids;
  for (const auto& w : words) ids.push_back(matcher.add(to_lower(w)));

  const std::size_t chunks = std::max<std::size_t>(1, std::min(workers, corpus.size()));
  std::vector<std::vector<std::uint64_t>> partial(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    auto& counts = partial[c];
    counts.assign(matcher.size(), 0);
    for (std::size_t d = c; d < corpus.size(); d += chunks) {
      for (const auto& [b, e] : sentence_spans(corpus[d].text, abbreviations)) {
        const auto sentence = std::string_view(corpus[d].text).substr(b, e - b);
        matcher.count_all(tokenize_spans(sentence, abbreviations), counts);
      }
    }
  });
  std::map<std::string, std::uint64_t> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::uint64_t total = 0;
    if (ids[i] != PhraseMatcher::kNone) {
      for (const auto& p : partial) total += p.empty() ? 0 : p[ids[i]];
    }
    out[words[i]] = total;
  }
  return out;
}

// Drops zero-frequency entries, then keeps k entries by count (ties
// lexicographic) or in generation order.
inline WordList filter_and_select(const WordList& list,
                                  const std::map<std::string, std::uint64_t>& freqs,
                                  const GenerationParams& params) {
  const auto freq = [&](const std::string& w) {
    auto it = freqs.find(w);
    return it == freqs.end() ? std::uint64_t{0} : it->second;
  };
  std::vector<std::string> survivors;
  for (const auto& w : list.entries) {
    if (freq(w) > 0) survivors.push_back(w);
  }
  if (params.selection_mode == SelectionMode::kFrequency) {
    std::stable_sort(survivors.begin(), survivors.end(),
                     [&](const std::string& a, const std::string& b) {
                       const auto fa = freq(a);
                       const auto fb = freq(b);
                       return fa != fb ? fa > fb : a < b;
                     });
  }
  const auto k = static_cast<std::size_t>(params.validation_count);
  if (survivors.size() > k) survivors.resize(k);

  WordList out{list.attribute, list.group, survivors, {}};
  for (const auto& [from, to] : list.counterpart) {
    if (out.contains(from)) out.counterpart[from] = to;
  }
  return out;
}

// Removes counterpart links whose target no longer exists in another list.
inline void prune_counterparts(std::vector<WordList>& lists) {
  for (auto& wl : lists) {
    for (auto it = wl.counterpart.begin(); it != wl.counterpart.end();) {
      const bool alive = std::any_of(lists.begin(), lists.end(), [&](const WordList& o) {
        return o.group != wl.group && o.contains(it->second);
      });
      it = alive ? std::next(it) : wl.counterpart.erase(it);
    }
  }
}

// ---------------------------------------------------------------------------
// Review

inline const std::map<std::string, std::string>& quality_criteria() {
  static const std::map<std::string, std::string> kCriteria{
      {"Q1", "is a category label for the group"},
      {"Q2", "is spelled and formed correctly"},
      {"Q3", "is unambiguous for this attribute"},
      {"Q4", "carries no stereotypical association"},
      {"Q5", "is not a compound of a label and a neutral word"},
      {"Q6", "is not a proper name"},
  };
  return kCriteria;
}

struct ReviewDecision {
  std::string word;
  std::string group;
  bool keep = true;
  std::vector<std::string> reasons;    // Q1..Q6
  std::optional<std::string> replacement;  // edit: keep under a new spelling
};

inline void to_json(nlohmann::json& j, const ReviewDecision& d) {
  j = nlohmann::json{{"word", d.word}, {"group", d.group}, {"keep", d.keep}, {"reasons", d.reasons}};
  if (d.replacement) j["replacement"] = *d.replacement;
}
inline void from_json(const nlohmann::json& j, ReviewDecision& d) {
  j.at("word").get_to(d.word);
  j.at("group").get_to(d.group);
  j.at("keep").get_to(d.keep);
  d.reasons = j.value("reasons", std::vector<std::string>{});
  for (const auto& r : d.reasons) {
    if (!quality_criteria().count(r)) {
      throw WordListError("unknown review reason '" + r + "'");
    }
  }
  d.replacement.reset();
  if (j.contains("replacement")) d.replacement = j.at("replacement").get<std::string>();
}

inline std::vector<ReviewDecision> read_decisions(std::istream& in) {
  std::vector<ReviewDecision> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw WordListError("decisions line " + std::to_string(n) + " is not JSON");
    }
    out.push_back(j.get<ReviewDecision>());
  }
  return out;
}

inline std::vector<ReviewDecision> load_decisions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw WordListError("cannot open decisions file " + path);
  return read_decisions(in);
}

// Applies recorded decisions for this list's group; later decisions for the
// same word win. Words without a decision are kept.
inline WordList apply_decisions(const WordList& list, const std::vector<ReviewDecision>& decisions) {
  std::map<std::string, const ReviewDecision*> latest;
  for (const auto& d : decisions) {
    if (d.group == list.group) latest[d.word] = &d;
  }
  WordList out{list.attribute, list.group, {}, {}};
  std::map<std::string, std::string> renamed;
  for (const auto& w : list.entries) {
    auto it = latest.find(w);
    if (it == latest.end()) {
      if (!out.contains(w)) out.entries.push_back(w);
      continue;
    }
    if (!it->second->keep) continue;
    std::string kept = it->second->replacement ? to_lower(trim(*it->second->replacement)) : w;
    if (kept.empty() || out.contains(kept)) continue;
    renamed[w] = kept;
    out.entries.push_back(std::move(kept));
  }
  for (const auto& [from, to] : list.counterpart) {
    auto r = renamed.find(from);
    const std::string key = r != renamed.end() ? r->second : from;
    if (out.contains(key)) out.counterpart[key] = to;
  }
  return out;
}

// Console review. Every answer is appended to `audit` as it is given, so an
// aborted session leaves a partial but valid decisions file. Returns nullopt
// when the reviewer quits or input ends early.
inline std::optional<WordList> review_interactive(const WordList& list, std::istream& in,
                                                  std::ostream& out, std::ostream& audit) {
  out << "Reviewing " << list.entries.size() << " words for " << list.attribute << "/"
      << list.group << ". Criteria:\n";
  for (const auto& [id, text] : quality_criteria()) out << "  " << id << ": " << text << '\n';

  std::vector<ReviewDecision> decisions;
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    const auto& word = list.entries[i];
    ReviewDecision d{word, list.group, true, {}, std::nullopt};
    for (;;) {
      out << '[' << i + 1 << '/' << list.entries.size() << "] " << word
          << "  (k)eep (r)eject (e)dit (q)uit: " << std::flush;
      std::string answer;
      if (!std::getline(in, answer)) return std::nullopt;
      const std::string a = to_lower(trim(answer));
      if (a == "q") return std::nullopt;
      if (a == "k" || a.empty()) break;
      if (a == "r") {
        out << "  violated criteria (e.g. Q3 Q4): " << std::flush;
        std::string reasons;
        if (!std::getline(in, reasons)) return std::nullopt;
        std::istringstream ss(reasons);
        for (std::string r; ss >> r;) {
          for (auto& c : r) c = ascii_upper(c);
          if (quality_criteria().count(r)) d.reasons.push_back(r);
        }
        d.keep = false;
        break;
      }
      if (a == "e") {
        out << "  replacement: " << std::flush;
        std::string repl;
        if (!std::getline(in, repl)) return std::nullopt;
        if (!trim(repl).empty()) d.replacement = std::string(trim(repl));
        break;
      }
    }
    audit << nlohmann::json(d).dump() << '\n' << std::flush;
    decisions.push_back(std::move(d));
  }
  return apply_decisions(list, decisions);
}

}  // namespace debias

#endif  // DEBIAS_WORDLIST_HPP_
