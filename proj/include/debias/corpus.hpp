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

// Corpus ingestion, sentence segmentation, the per-sentence metadata store
// and reconstruction of the debiased corpus.

#ifndef DEBIAS_CORPUS_HPP_
#define DEBIAS_CORPUS_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "debias/indicators.hpp"
#include "debias/parallel.hpp"
#include "debias/text.hpp"
#include "json.hpp"

namespace debias {

struct Document {
  std::string doc_id;
  std::string text;

  friend bool operator==(const Document&, const Document&) = default;
};

// Why the augmentation stage left a sentence untouched.
enum class SkipReason { kPolitical, kHistorical, kYear, kNotRelevant, kFlaggedRemoved };

// Outcome of the detection step when no verdict was produced.
enum class DetectionStatus { kTooLong, kFailed };

// Outcome of the assessment step when no indicators were produced.
enum class AssessmentStatus { kFailed };

NLOHMANN_JSON_SERIALIZE_ENUM(SkipReason,
                             {{SkipReason::kPolitical, "political"},
                              {SkipReason::kHistorical, "historical"},
                              {SkipReason::kYear, "year"},
                              {SkipReason::kNotRelevant, "not_relevant"},
                              {SkipReason::kFlaggedRemoved, "flagged_removed"}})
NLOHMANN_JSON_SERIALIZE_ENUM(DetectionStatus,
                             {{DetectionStatus::kTooLong, "too_long"},
                              {DetectionStatus::kFailed, "failed"}})
NLOHMANN_JSON_SERIALIZE_ENUM(AssessmentStatus,
                             {{AssessmentStatus::kFailed, "failed"}})

inline std::string to_string(SkipReason r) {
  return nlohmann::json(r).get<std::string>();
}

struct MetadataRecord {
  std::map<std::string, std::vector<std::string>> words_per_group;
  std::map<std::string, std::uint64_t> counts_per_group;
  bool relevant_sentence = false;
  bool potential_stereotype = false;
  std::optional<DetectionStatus> detection_status;
  std::optional<IndicatorRecord> linguistic_indicators;
  std::optional<AssessmentStatus> assessment_status;
  std::optional<double> score_scsc;
  bool remove_sentence = false;
  std::optional<std::string> text_cda;
  std::optional<SkipReason> skip_reason;

  friend bool operator==(const MetadataRecord&, const MetadataRecord&) = default;
};

struct SentenceEntity {
  std::string doc_id;
  std::size_t sent_id = 0;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::string text;
  MetadataRecord metadata;

  friend bool operator==(const SentenceEntity&, const SentenceEntity&) = default;
};

inline bool entity_order(const SentenceEntity& a, const SentenceEntity& b) {
  return a.doc_id != b.doc_id ? a.doc_id < b.doc_id : a.sent_id < b.sent_id;
}

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DuplicateDocId : public CorpusError {
 public:
  DuplicateDocId(std::string doc_id, std::size_t line)
      : CorpusError("duplicate doc_id '" + doc_id + "' at line " +
                    std::to_string(line)),
        doc_id_(std::move(doc_id)),
        line_(line) {}
  const std::string& doc_id() const { return doc_id_; }
  std::size_t line() const { return line_; }

 private:
  std::string doc_id_;
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// Corpus JSONL

inline std::vector<Document> parse_corpus(std::istream& in) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("doc_id") ||
        !j.contains("text") || !j["doc_id"].is_string() ||
        !j["text"].is_string()) {
      throw CorpusError("malformed corpus record at line " +
                        std::to_string(line_no));
    }
    Document doc{j["doc_id"].get<std::string>(), j["text"].get<std::string>()};
    if (doc.doc_id.empty()) {
      throw CorpusError("empty doc_id at line " + std::to_string(line_no));
    }
    if (!seen.insert(doc.doc_id).second) throw DuplicateDocId(doc.doc_id, line_no);
    docs.push_back(std::move(doc));
  }
  return docs;
}

inline std::vector<Document> load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open corpus: " + path);
  return parse_corpus(in);
}

inline void write_corpus(std::ostream& out, const std::vector<Document>& docs) {
  for (const auto& d : docs) {
    out << nlohmann::json{{"doc_id", d.doc_id}, {"text", d.text}}.dump() << '\n';
  }
}

inline void save_corpus(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorpusError("cannot write corpus: " + path);
  write_corpus(out, docs);
}

// ---------------------------------------------------------------------------
// Segmentation

namespace detail {

inline bool is_space_byte(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Length of an opening quote at i, or 0.
inline std::size_t opening_quote_at(std::string_view text, std::size_t i) {
  if (text[i] == '"' || text[i] == '\'') return 1;
  if (text.substr(i, 3) == "\xE2\x80\x9C" || text.substr(i, 3) == "\xE2\x80\x98")
    return 3;
  return 0;
}

// Length of a closing quote or bracket at i, or 0.
inline std::size_t closing_mark_at(std::string_view text, std::size_t i) {
  const char c = text[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']' || c == '}') return 1;
  if (text.substr(i, 3) == "\xE2\x80\x9D" || text.substr(i, 3) == "\xE2\x80\x99")
    return 3;
  return 0;
}

// True when the period at `dot` closes a stop-listed abbreviation.
inline bool ends_abbreviation(std::string_view text, std::size_t dot,
                              const Abbreviations& abbreviations) {
  std::size_t b = dot;
  while (b > 0 && !is_space_byte(text[b - 1])) --b;
  while (b < dot && !is_ascii_alnum(text[b])) ++b;
  if (b == dot) return false;
  return abbreviations.contains(to_lower(text.substr(b, dot - b + 1)));
}

}  // namespace detail

// Byte spans [begin, end) of the sentences in `text`. A sentence ends at a
// run of . ! ? (plus closing quotes) followed by whitespace and an uppercase
// letter or opening quote, unless the run is a single period closing a
// listed abbreviation. Spans exclude surrounding whitespace.
inline std::vector<std::pair<std::size_t, std::size_t>> sentence_spans(
    std::string_view text, const Abbreviations& abbreviations) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  const std::size_t n = text.size();
  std::size_t start = 0;
  while (start < n && detail::is_space_byte(text[start])) ++start;
  if (start == n) return spans;
  std::size_t last = n;
  while (last > start && detail::is_space_byte(text[last - 1])) --last;

  std::size_t i = start;
  while (i < last) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < last && (text[end] == '.' || text[end] == '!' || text[end] == '?'))
      ++end;
    const bool single_period = (end - i == 1) && c == '.';
    const std::size_t dot = i;
    while (end < last) {
      const std::size_t q = detail::closing_mark_at(text, end);
      if (q == 0) break;
      end += q;
    }
    if (end >= last || !detail::is_space_byte(text[end])) {
      i = end;
      continue;
    }
    std::size_t next = end;
    while (next < last && detail::is_space_byte(text[next])) ++next;
    const bool opens_sentence =
        is_ascii_upper(text[next]) || detail::opening_quote_at(text, next) > 0;
    if (opens_sentence &&
        !(single_period && detail::ends_abbreviation(text, dot, abbreviations))) {
      spans.emplace_back(start, end);
      start = next;
    }
    i = next;
  }
  spans.emplace_back(start, last);
  return spans;
}

inline std::vector<SentenceEntity> segment(const Document& doc,
                                           const Abbreviations& abbreviations) {
  std::vector<SentenceEntity> out;
  std::size_t id = 0;
  for (const auto& [b, e] : sentence_spans(doc.text, abbreviations)) {
    SentenceEntity s;
    s.doc_id = doc.doc_id;
    s.sent_id = id++;
    s.char_start = b;
    s.char_end = e;
    s.text = doc.text.substr(b, e - b);
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<SentenceEntity> segment(const Document& doc) {
  static const Abbreviations kDefaults;
  return segment(doc, kDefaults);
}

// Segments every document (optionally in parallel) and returns entities in
// metadata-store order, sorted by (doc_id, sent_id).
inline std::vector<SentenceEntity> segment_corpus(
    const std::vector<Document>& docs, const Abbreviations& abbreviations,
    std::size_t workers = 1) {
  std::vector<std::vector<SentenceEntity>> per_doc(docs.size());
  parallel_for(docs.size(), workers, [&](std::size_t i) {
    per_doc[i] = segment(docs[i], abbreviations);
  });
  std::vector<SentenceEntity> out;
  for (auto& v : per_doc) {
    for (auto& s : v) out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), entity_order);
  return out;
}

// ---------------------------------------------------------------------------
// Reconstruction

// Rebuilds documents from their sentences. Removed sentences are dropped with
// their leading separator; augmented sentences are replaced by text_cda;
// everything else keeps its original bytes. Documents without entities are
// passed through unchanged.
inline std::vector<Document> build_debiased(
    const std::vector<SentenceEntity>& entities,
    const std::vector<Document>& corpus) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < corpus.size(); ++i) index[corpus[i].doc_id] = i;
  std::vector<std::vector<const SentenceEntity*>> by_doc(corpus.size());
  for (const auto& e : entities) {
    auto it = index.find(e.doc_id);
    if (it == index.end()) {
      throw CorpusError("sentence references unknown doc_id '" + e.doc_id + "'");
    }
    by_doc[it->second].push_back(&e);
  }

  std::vector<Document> out;
  out.reserve(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const Document& doc = corpus[d];
    auto& sents = by_doc[d];
    if (sents.empty()) {
      out.push_back(doc);
      continue;
    }
    std::sort(sents.begin(), sents.end(),
              [](const SentenceEntity* a, const SentenceEntity* b) {
                return a->sent_id < b->sent_id;
              });
    std::string text;
    bool emitted = false;
    std::size_t prev_end = 0;
    for (const SentenceEntity* s : sents) {
      if (s->char_start < prev_end || s->char_end < s->char_start ||
          s->char_end > doc.text.size()) {
        throw CorpusError("sentence offsets out of range in doc '" +
                          doc.doc_id + "'");
      }
      const std::string_view separator(doc.text.data() + prev_end,
                                       s->char_start - prev_end);
      prev_end = s->char_end;
      if (s->metadata.remove_sentence) continue;
      if (emitted) {
        text.append(separator);
      } else {
        // The document prefix always precedes the first kept sentence.
        text.append(doc.text, 0, sents.front()->char_start);
      }
      emitted = true;
      if (s->metadata.text_cda) {
        text.append(*s->metadata.text_cda);
      } else {
        text.append(doc.text, s->char_start, s->char_end - s->char_start);
      }
    }
    if (emitted) text.append(doc.text, prev_end, std::string::npos);
    out.push_back(Document{doc.doc_id, std::move(text)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metadata store JSONL

inline void to_json(nlohmann::json& j, const MetadataRecord& m) {
  j = nlohmann::json::object();
  j["words_per_group"] = m.words_per_group;
  j["counts_per_group"] = m.counts_per_group;
  j["relevant_sentence"] = m.relevant_sentence;
  j["potential_stereotype"] = m.potential_stereotype;
  if (m.detection_status) j["detection_status"] = *m.detection_status;
  if (m.linguistic_indicators) j["linguistic_indicators"] = *m.linguistic_indicators;
  if (m.assessment_status) j["assessment_status"] = *m.assessment_status;
  if (m.score_scsc) j["score_scsc"] = *m.score_scsc;
  j["remove_sentence"] = m.remove_sentence;
  if (m.text_cda) j["text_cda"] = *m.text_cda;
  if (m.skip_reason) j["skip_reason"] = *m.skip_reason;
}

inline void from_json(const nlohmann::json& j, MetadataRecord& m) {
  m = MetadataRecord{};
  if (j.contains("words_per_group")) j.at("words_per_group").get_to(m.words_per_group);
  if (j.contains("counts_per_group")) j.at("counts_per_group").get_to(m.counts_per_group);
  m.relevant_sentence = j.value("relevant_sentence", false);
  m.potential_stereotype = j.value("potential_stereotype", false);
  if (j.contains("detection_status"))
    m.detection_status = j.at("detection_status").get<DetectionStatus>();
  if (j.contains("linguistic_indicators"))
    m.linguistic_indicators = indicator_record_from_json(j.at("linguistic_indicators"));
  if (j.contains("assessment_status"))
    m.assessment_status = j.at("assessment_status").get<AssessmentStatus>();
  if (j.contains("score_scsc")) m.score_scsc = j.at("score_scsc").get<double>();
  m.remove_sentence = j.value("remove_sentence", false);
  if (j.contains("text_cda")) m.text_cda = j.at("text_cda").get<std::string>();
  if (j.contains("skip_reason")) m.skip_reason = j.at("skip_reason").get<SkipReason>();
}

inline void to_json(nlohmann::json& j, const SentenceEntity& s) {
  j = nlohmann::json{{"doc_id", s.doc_id},         {"sent_id", s.sent_id},
                     {"char_start", s.char_start}, {"char_end", s.char_end},
                     {"text", s.text},             {"metadata", s.metadata}};
}

inline void from_json(const nlohmann::json& j, SentenceEntity& s) {
  j.at("doc_id").get_to(s.doc_id);
  j.at("sent_id").get_to(s.sent_id);
  j.at("char_start").get_to(s.char_start);
  j.at("char_end").get_to(s.char_end);
  j.at("text").get_to(s.text);
  s.metadata = j.contains("metadata") ? j.at("metadata").get<MetadataRecord>()
                                      : MetadataRecord{};
}

class StoreError : public std::runtime_error {
 public:
  StoreError(std::size_t line, std::size_t offset, const std::string& what)
      : std::runtime_error("corrupt metadata store line " + std::to_string(line) +
                           " (byte offset " + std::to_string(offset) + "): " + what),
        line_(line),
        offset_(offset) {}
  std::size_t line() const { return line_; }
  std::size_t offset() const { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

inline std::vector<SentenceEntity> read_store(std::istream& in) {
  std::vector<SentenceEntity> out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    if (trim(line).empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<SentenceEntity>());
    } catch (const std::exception& e) {
      throw StoreError(line_no, line_offset, e.what());
    }
  }
  std::stable_sort(out.begin(), out.end(), entity_order);
  return out;
}

inline std::vector<SentenceEntity> load_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open metadata store: " + path);
  return read_store(in);
}

// Writes entities sorted by (doc_id, sent_id).
inline void write_store(std::ostream& out, std::vector<SentenceEntity> entities) {
  std::stable_sort(entities.begin(), entities.end(), entity_order);
  for (const auto& e : entities) out << nlohmann::json(e).dump() << '\n';
}

inline void save_store(const std::string& path,
                       const std::vector<SentenceEntity>& entities) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write metadata store: " + path);
    write_store(out, entities);
  }
  std::rename(tmp.c_str(), path.c_str());
}

}  // namespace debias

#endif  // DEBIAS_CORPUS_HPP_
