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

// Representation bias: word-list matching, group counts and the DR score.

#ifndef DEBIAS_REPBIAS_HPP_
#define DEBIAS_REPBIAS_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "debias/corpus.hpp"
#include "debias/log.hpp"
#include "debias/matcher.hpp"
#include "debias/parallel.hpp"
#include "debias/wordlist.hpp"
#include "json.hpp"

namespace debias {

// Matches sentences against the word lists of one attribute. An entry that
// appears in several lists belongs to the first list in spec order.
class WordMatcher {
 public:
  WordMatcher(const AttributeSpec& spec, const std::vector<WordList>& lists,
              Abbreviations abbreviations = Abbreviations())
      : spec_(spec), matcher_(std::move(abbreviations)) {
    spec_.validate();
    std::map<std::string, std::string> owner;
    for (const auto& g : spec_.groups) {
      auto wl = std::find_if(lists.begin(), lists.end(),
                             [&](const WordList& w) { return w.group == g; });
      if (wl == lists.end()) continue;
      if (wl->attribute != spec_.attribute) {
        throw WordListError("list " + wl->group + " belongs to attribute " + wl->attribute);
      }
      for (const auto& entry : wl->entries) {
        auto [it, fresh] = owner.emplace(entry, g);
        if (!fresh) {
          if (it->second != g) {
            Log::warn("repbias: '" + entry + "' listed for both " + it->second + " and " + g +
                      "; counted for " + it->second);
          }
          continue;
        }
        const std::size_t id = matcher_.add(entry);
        if (id == PhraseMatcher::kNone) continue;
        group_of_.resize(id + 1);
        entry_of_.resize(id + 1);
        group_of_[id] = g;
        entry_of_[id] = entry;
      }
    }
  }

  const AttributeSpec& spec() const { return spec_; }
  const Abbreviations& abbreviations() const { return matcher_.abbreviations(); }

  struct Hit {
    std::string group;
    std::string entry;
    std::size_t begin = 0;  // byte span in the matched text
    std::size_t end = 0;
    std::size_t first_token = 0;
    std::size_t last_token = 0;
  };

  std::vector<Hit> find(const std::vector<Token>& tokens) const {
    std::vector<Hit> hits;
    for (const auto& m : matcher_.match(tokens)) {
      hits.push_back(Hit{group_of_[m.phrase], entry_of_[m.phrase], tokens[m.first].begin,
                         tokens[m.last - 1].end, m.first, m.last});
    }
    return hits;
  }

  std::vector<Hit> find(std::string_view text) const {
    return find(tokenize_spans(text, abbreviations()));
  }

 private:
  AttributeSpec spec_;
  PhraseMatcher matcher_;
  std::vector<std::string> group_of_;
  std::vector<std::string> entry_of_;
};

// Fills the matching fields of the entity's metadata. Every group of the
// spec is present, with zero where nothing matched.
inline void match_sentence(SentenceEntity& entity, const WordMatcher& matcher) {
  auto& md = entity.metadata;
  md.words_per_group.clear();
  md.counts_per_group.clear();
  for (const auto& g : matcher.spec().groups) {
    md.words_per_group[g];
    md.counts_per_group[g] = 0;
  }
  for (auto& hit : matcher.find(entity.text)) {
    md.words_per_group[hit.group].push_back(std::move(hit.entry));
    ++md.counts_per_group[hit.group];
  }
  md.relevant_sentence = std::any_of(md.counts_per_group.begin(), md.counts_per_group.end(),
                                     [](const auto& kv) { return kv.second > 0; });
}

inline void match_all(std::vector<SentenceEntity>& entities, const WordMatcher& matcher,
                      std::size_t workers = 1) {
  parallel_for(entities.size(), workers, [&](std::size_t i) { match_sentence(entities[i], matcher); });
}

// ---------------------------------------------------------------------------
// Counts and DR

struct GroupCounts {
  std::string attribute;
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t relevant_sentences = 0;

  static GroupCounts zero(const AttributeSpec& spec) {
    GroupCounts c{spec.attribute, {}, 0};
    for (const auto& g : spec.groups) c.counts[g] = 0;
    return c;
  }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& [g, n] : counts) t += n;
    return t;
  }

  GroupCounts& operator+=(const GroupCounts& other) {
    for (const auto& [g, n] : other.counts) counts[g] += n;
    relevant_sentences += other.relevant_sentences;
    return *this;
  }

  friend bool operator==(const GroupCounts&, const GroupCounts&) = default;
};

inline void to_json(nlohmann::json& j, const GroupCounts& c) {
  j = nlohmann::json{{"attribute", c.attribute},
                     {"counts", c.counts},
                     {"relevant_sentences", c.relevant_sentences}};
}
inline void from_json(const nlohmann::json& j, GroupCounts& c) {
  j.at("attribute").get_to(c.attribute);
  j.at("counts").get_to(c.counts);
  c.relevant_sentences = j.value("relevant_sentences", std::uint64_t{0});
}

inline GroupCounts count_groups(const AttributeSpec& spec,
                                const std::vector<SentenceEntity>& entities) {
  GroupCounts c = GroupCounts::zero(spec);
  for (const auto& e : entities) {
    for (const auto& [g, n] : e.metadata.counts_per_group) c.counts[g] += n;
    if (e.metadata.relevant_sentence) ++c.relevant_sentences;
  }
  return c;
}

inline double dr_max(std::size_t groups) {
  return static_cast<double>(groups - 1) / static_cast<double>(groups);
}

struct DrValue {
  double dr = 0.0;
  bool no_observations = false;
};

// DR = 1/2 * sum_i |c_i / T - 1/M|, evaluated as sum_i |M c_i - T| / (2 M T)
// in integers so uniform counts give exactly 0 and the bounds are exact.
// All-zero counts yield dr_max with the no_observations flag.
inline DrValue dr_score(std::span<const std::uint64_t> counts) {
  const std::size_t m = counts.size();
  if (m < 2) return {0.0, true};
  unsigned __int128 total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return {dr_max(m), true};
  unsigned __int128 deviation = 0;
  for (auto c : counts) {
    const unsigned __int128 scaled = static_cast<unsigned __int128>(c) * m;
    deviation += scaled > total ? scaled - total : total - scaled;
  }
  return {static_cast<double>(deviation) / static_cast<double>(2 * m * total), false};
}

inline DrValue dr_score(const GroupCounts& counts) {
  std::vector<std::uint64_t> v;
  for (const auto& [g, n] : counts.counts) v.push_back(n);
  return dr_score(v);
}

inline double compute_dr(const GroupCounts& counts) { return dr_score(counts).dr; }

// argmax / argmin over the counts; ties go to the lexicographically first group.
inline std::string majority_group(const GroupCounts& c) {
  std::string best;
  std::uint64_t n = 0;
  bool first = true;
  for (const auto& [g, v] : c.counts) {
    if (first || v > n) best = g, n = v, first = false;
  }
  return best;
}

inline std::string minority_group(const GroupCounts& c) {
  std::string best;
  std::uint64_t n = 0;
  bool first = true;
  for (const auto& [g, v] : c.counts) {
    if (first || v < n) best = g, n = v, first = false;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Cumulative DR

struct CumulativePoint {
  std::size_t list_length = 0;
  double dr = 0.0;
};

// Point i uses the first i entries of every list (a shorter list contributes
// all of its entries). Lists are expected in descending-frequency order.
inline std::vector<CumulativePoint> cumulative_dr(
    const std::vector<WordList>& lists, const std::map<std::string, std::uint64_t>& counts) {
  std::size_t longest = 0;
  for (const auto& wl : lists) longest = std::max(longest, wl.entries.size());
  std::vector<std::uint64_t> running(lists.size(), 0);
  std::vector<CumulativePoint> series;
  series.reserve(longest);
  for (std::size_t i = 0; i < longest; ++i) {
    for (std::size_t g = 0; g < lists.size(); ++g) {
      if (i >= lists[g].entries.size()) continue;
      auto it = counts.find(lists[g].entries[i]);
      if (it != counts.end()) running[g] += it->second;
    }
    series.push_back({i + 1, dr_score(running).dr});
  }
  return series;
}

// Occurrences per matched entry, taken from the metadata store.
inline std::map<std::string, std::uint64_t> entry_counts(
    const std::vector<SentenceEntity>& entities) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& e : entities) {
    for (const auto& [g, words] : e.metadata.words_per_group) {
      for (const auto& w : words) ++out[w];
    }
  }
  return out;
}

// Copies of the lists with entries ordered by descending count, ties
// lexicographic.
inline std::vector<WordList> sort_by_frequency(std::vector<WordList> lists,
                                               const std::map<std::string, std::uint64_t>& counts) {
  const auto freq = [&](const std::string& w) {
    auto it = counts.find(w);
    return it == counts.end() ? std::uint64_t{0} : it->second;
  };
  for (auto& wl : lists) {
    std::stable_sort(wl.entries.begin(), wl.entries.end(),
                     [&](const std::string& a, const std::string& b) {
                       const auto fa = freq(a);
                       const auto fb = freq(b);
                       return fa != fb ? fa > fb : a < b;
                     });
  }
  return lists;
}

inline void write_cumulative_csv(std::ostream& out, const std::vector<CumulativePoint>& series) {
  out << "list_length,dr\n";
  char buf[64];
  for (const auto& p : series) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.dr);
    out << p.list_length << ',' << buf << '\n';
  }
}

// ---------------------------------------------------------------------------
// Report

struct DRReport {
  std::string attribute;
  GroupCounts counts;
  double dr = 0.0;
  double dr_max = 0.0;
  bool no_observations = false;
  std::string majority_group;
  std::string minority_group;
  std::map<std::string, double> per_document;  // documents with observations only
};

inline DRReport make_report(const AttributeSpec& spec, const GroupCounts& counts,
                            const std::map<std::string, double>& per_document = {}) {
  const auto v = dr_score(counts);
  return DRReport{spec.attribute,  counts, v.dr, debias::dr_max(spec.size()), v.no_observations,
                  debias::majority_group(counts), debias::minority_group(counts), per_document};
}

inline DRReport emit_report(const AttributeSpec& spec,
                            const std::vector<SentenceEntity>& entities) {
  std::map<std::string, GroupCounts> per_doc;
  for (const auto& e : entities) {
    auto [it, fresh] = per_doc.try_emplace(e.doc_id, GroupCounts::zero(spec));
    for (const auto& [g, n] : e.metadata.counts_per_group) it->second.counts[g] += n;
  }
  std::map<std::string, double> per_document;
  for (const auto& [doc, c] : per_doc) {
    const auto v = dr_score(c);
    if (!v.no_observations) per_document[doc] = v.dr;
  }
  return make_report(spec, count_groups(spec, entities), per_document);
}

inline void to_json(nlohmann::json& j, const DRReport& r) {
  j = nlohmann::json{{"attribute", r.attribute},
                     {"counts", r.counts.counts},
                     {"relevant_sentences", r.counts.relevant_sentences},
                     {"total_occurrences", r.counts.total()},
                     {"dr", r.dr},
                     {"dr_max", r.dr_max},
                     {"no_observations", r.no_observations},
                     {"majority_group", r.majority_group},
                     {"minority_group", r.minority_group},
                     {"per_document", r.per_document}};
}

inline void from_json(const nlohmann::json& j, DRReport& r) {
  j.at("attribute").get_to(r.attribute);
  r.counts.attribute = r.attribute;
  j.at("counts").get_to(r.counts.counts);
  r.counts.relevant_sentences = j.value("relevant_sentences", std::uint64_t{0});
  j.at("dr").get_to(r.dr);
  j.at("dr_max").get_to(r.dr_max);
  r.no_observations = j.value("no_observations", false);
  j.at("majority_group").get_to(r.majority_group);
  j.at("minority_group").get_to(r.minority_group);
  r.per_document = j.value("per_document", std::map<std::string, double>{});
}

}  // namespace debias

#endif  // DEBIAS_REPBIAS_HPP_
