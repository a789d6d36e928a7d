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

// End-to-end orchestration: configuration, stage sequencing with resumable
// checkpoints, run-directory artifacts and the summary report.

#ifndef DEBIAS_PIPELINE_HPP_
#define DEBIAS_PIPELINE_HPP_

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "debias/cda.hpp"
#include "debias/corpus.hpp"
#include "debias/llm.hpp"
#include "debias/prompts.hpp"
#include "debias/repbias.hpp"
#include "debias/stereotype.hpp"
#include "debias/text.hpp"
#include "debias/wordlist.hpp"
#include "json.hpp"

namespace debias {

namespace fs = std::filesystem;

class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kToolVersion = "0.1.0";

inline const std::vector<std::string>& pipeline_stages() {
  static const std::vector<std::string> stages = {"segment", "match", "detect", "assess",
                                                  "filter",  "cda",   "build",  "final"};
  return stages;
}

inline std::size_t stage_index(std::string_view name) {
  const auto& s = pipeline_stages();
  auto it = std::find(s.begin(), s.end(), name);
  if (it == s.end()) throw PipelineError("unknown stage '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - s.begin());
}

// Metadata fields each stage may write. Entity identity fields belong to
// segment.
inline const std::map<std::string, std::vector<std::string>>& field_ownership() {
  static const std::map<std::string, std::vector<std::string>> owners = {
      {"segment", {"doc_id", "sent_id", "char_start", "char_end", "text"}},
      {"match", {"words_per_group", "counts_per_group", "relevant_sentence"}},
      {"detect", {"potential_stereotype", "detection_status"}},
      {"assess", {"linguistic_indicators", "assessment_status"}},
      {"filter", {"score_scsc", "remove_sentence"}},
      {"cda", {"text_cda", "skip_reason"}},
      {"build", {}},
      {"final", {}},
  };
  return owners;
}

// ---------------------------------------------------------------------------
// Configuration

struct TranscriptSettings {
  llm::TranscriptMode mode = llm::TranscriptMode::kReplay;
  std::string path;  // empty: in-memory only
};

struct PipelineConfig {
  std::string corpus;
  AttributeSpec spec;
  std::string wordlists;
  std::optional<std::string> abbreviations;
  std::optional<std::string> prompts_dir;
  std::optional<std::string> precheck_dir;
  bool stereotype_enabled = true;
  StereotypeConfig stereotype;
  std::string score_model;
  CdaConfig cda;
  nlohmann::json llm = nlohmann::json::object();  // "default" plus per-stage overrides
  TranscriptSettings transcript;
  std::string output;
  std::size_t workers = 1;
  bool checkpoint = true;  // persist the store after every stage
  nlohmann::json raw;      // the config as written, minus the output path

  // Paths in `j` are taken relative to `base_dir`.
  static PipelineConfig from_json(const nlohmann::json& j, const fs::path& base_dir) {
    PipelineConfig c;
    auto path = [&](const std::string& p) {
      const fs::path q(p);
      return (q.is_absolute() ? q : base_dir / q).lexically_normal().string();
    };
    try {
      c.corpus = path(j.at("corpus").get<std::string>());
      const auto& attr = j.at("attribute");
      if (attr.is_string()) {
        auto spec = builtin_spec(attr.get<std::string>());
        if (!spec) throw PipelineError("unknown attribute '" + attr.get<std::string>() + "'");
        c.spec = *spec;
      } else {
        attr.get_to(c.spec);
      }
      c.spec.validate();
      c.wordlists = path(j.at("wordlists").get<std::string>());
      if (j.contains("abbreviations")) c.abbreviations = path(j["abbreviations"].get<std::string>());
      if (j.contains("prompts")) c.prompts_dir = path(j["prompts"].get<std::string>());
      if (const auto s = j.value("stereotype", nlohmann::json::object()); !s.empty()) {
        c.stereotype_enabled = s.value("enabled", true);
        c.stereotype.threshold = s.value("threshold", c.stereotype.threshold);
        c.stereotype.max_tokens = s.value("max_tokens", c.stereotype.max_tokens);
        if (s.contains("score_model")) c.score_model = path(s["score_model"].get<std::string>());
      }
      c.stereotype.validate();
      if (c.score_model.empty()) c.score_model = std::string(DEBIAS_DATA_DIR) + "/score_model.json";
      if (j.contains("cda")) {
        j["cda"].get_to(c.cda);
        if (j["cda"].contains("precheck")) c.precheck_dir = path(j["cda"]["precheck"].get<std::string>());
      }
      if (j.contains("llm")) c.llm = j["llm"];
      if (j.contains("transcript")) {
        const auto& t = j["transcript"];
        c.transcript.mode = llm::parse_transcript_mode(t.value("mode", "replay"));
        if (t.contains("path")) c.transcript.path = path(t["path"].get<std::string>());
      }
      c.output = path(j.value("output", std::string("run")));
      c.workers = j.value("workers", std::size_t{1});
      c.checkpoint = j.value("checkpoint", true);
    } catch (const nlohmann::json::exception& e) {
      throw PipelineError(std::string("invalid config: ") + e.what());
    }
    c.raw = j;
    c.raw.erase("output");
    return c;
  }

  static PipelineConfig load(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw PipelineError("cannot read config " + file);
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw PipelineError("config " + file + " is not valid JSON");
    return from_json(j, fs::path(file).parent_path());
  }

  // Default settings overlaid with the stage's own section.
  llm::EndpointConfig endpoint(const std::string& stage) const {
    nlohmann::json merged = llm.value("default", nlohmann::json::object());
    if (llm.contains(stage)) merged.merge_patch(llm.at(stage));
    return merged.get<llm::EndpointConfig>();
  }

  // Input files must exist and every group needs a word list.
  void validate() const {
    auto need = [](const std::string& p, const char* what) {
      if (!fs::exists(p)) throw PipelineError(std::string(what) + " not found: " + p);
    };
    need(corpus, "corpus");
    need(wordlists, "word list directory");
    for (const auto& g : spec.groups) {
      if (!fs::exists(wordlist_path(wordlists, spec, g))) {
        throw PipelineError("word list for group '" + g + "' not found under " + wordlists);
      }
    }
    if (abbreviations) need(*abbreviations, "abbreviation list");
    if (prompts_dir) need(*prompts_dir, "prompt directory");
    if (precheck_dir) need(*precheck_dir, "precheck directory");
    if (stereotype_enabled) need(score_model, "score model");
    cda.validate();
  }
};

// ---------------------------------------------------------------------------
// Summary

struct PipelineSummary {
  std::string attribute;
  std::map<std::string, std::size_t> list_sizes;
  std::uint64_t sentences = 0;
  std::uint64_t relevant_sentences = 0;
  std::map<std::string, std::uint64_t> counts_before;
  double dr_before = 0.0;
  std::uint64_t potential_stereotypes = 0;
  std::uint64_t detection_too_long = 0;
  std::uint64_t detection_failed = 0;
  std::uint64_t assessment_failed = 0;
  std::uint64_t removed = 0;
  std::uint64_t substituted = 0;
  std::map<std::string, std::uint64_t> skipped;
  std::map<std::string, std::uint64_t> counts_after;
  double dr_after = 0.0;

  friend bool operator==(const PipelineSummary&, const PipelineSummary&) = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PipelineSummary, attribute, list_sizes, sentences,
                                   relevant_sentences, counts_before, dr_before,
                                   potential_stereotypes, detection_too_long, detection_failed,
                                   assessment_failed, removed, substituted, skipped, counts_after,
                                   dr_after)

// Counts read off the store. DR values are 0 when nothing was observed.
inline PipelineSummary report_summary(const std::vector<SentenceEntity>& entities,
                                      const WordMatcher& matcher,
                                      const std::vector<WordList>& lists) {
  PipelineSummary s;
  s.attribute = matcher.spec().attribute;
  for (const auto& g : matcher.spec().groups) {
    auto it = std::find_if(lists.begin(), lists.end(), [&](const WordList& w) { return w.group == g; });
    s.list_sizes[g] = it == lists.end() ? 0 : it->entries.size();
  }
  const GroupCounts before = count_groups(matcher.spec(), entities);
  s.sentences = entities.size();
  s.relevant_sentences = before.relevant_sentences;
  s.counts_before = before.counts;
  const auto dr_b = dr_score(before);
  s.dr_before = dr_b.no_observations ? 0.0 : dr_b.dr;
  for (const auto& e : entities) {
    const auto& md = e.metadata;
    s.potential_stereotypes += md.potential_stereotype;
    s.detection_too_long += md.detection_status == DetectionStatus::kTooLong;
    s.detection_failed += md.detection_status == DetectionStatus::kFailed;
    s.assessment_failed += md.assessment_status == AssessmentStatus::kFailed;
    s.removed += md.remove_sentence;
    s.substituted += md.text_cda.has_value();
    if (md.skip_reason) ++s.skipped[to_string(*md.skip_reason)];
  }
  const GroupCounts after = effective_counts(entities, matcher);
  s.counts_after = after.counts;
  const auto dr_a = dr_score(after);
  s.dr_after = dr_a.no_observations ? 0.0 : dr_a.dr;
  return s;
}

inline std::string with_separators(std::uint64_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

inline std::string capitalized(std::string s) {
  if (!s.empty()) s[0] = ascii_upper(s[0]);
  return s;
}

// Markdown table with one row per run: list sizes, relevant sentences,
// occurrences, DR, filtered stereotypes, modified sentences, DR after CDA.
inline std::string format_summary_table(
    const std::vector<std::pair<std::string, PipelineSummary>>& rows) {
  auto groups = [](const auto& m, auto fmt) {
    std::string out;
    for (const auto& [g, v] : m) {
      if (!out.empty()) out += ", ";
      out += capitalized(g) + ": " + fmt(v);
    }
    return out;
  };
  auto num = [](auto v) { return with_separators(static_cast<std::uint64_t>(v)); };
  auto dr = [](const std::string& attr, double v) {
    std::ostringstream o;
    o << "DR_" << attr << " = " << std::fixed << std::setprecision(2) << v;
    return o.str();
  };
  std::ostringstream out;
  out << "| Run | Category labels | Relevant sentences | Occurrence per group | "
         "Representation bias | Filtered stereotypes | Mod. sentences | DR after CDA |\n"
      << "|---|---|---:|---|---:|---:|---:|---:|\n";
  for (const auto& [label, s] : rows) {
    out << "| " << label << " | " << groups(s.list_sizes, num) << " | "
        << num(s.relevant_sentences) << " | " << groups(s.counts_before, num) << " | "
        << dr(s.attribute, s.dr_before) << " | " << num(s.removed) << " | "
        << num(s.substituted) << " | " << dr(s.attribute, s.dr_after) << " |\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Run

struct StageStamp {
  std::string name;
  std::string fingerprint;
  friend bool operator==(const StageStamp&, const StageStamp&) = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(StageStamp, name, fingerprint)

struct PipelineHooks {
  // Builds the network client for record/live transcript modes.
  std::function<std::unique_ptr<llm::ChatClient>(const llm::EndpointConfig&)> live_client;
  std::function<void(std::string_view)> progress;
};

struct PipelineResult {
  std::vector<std::string> ran;
  std::vector<std::string> skipped;
  PipelineSummary summary;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PipelineError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw PipelineError("cannot write " + path.string());
    out << content;
    if (!out.flush()) throw PipelineError("cannot write " + path.string());
  }
  fs::rename(tmp, path);
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline std::vector<StageStamp> read_stamps(const fs::path& path) {
  if (!fs::exists(path)) return {};
  const auto j = nlohmann::json::parse(read_file(path.string()), nullptr, false);
  if (j.is_discarded() || !j.contains("stages")) return {};
  return j["stages"].get<std::vector<StageStamp>>();
}

inline std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string prompt_digest(const PromptCatalog& prompts, std::string_view prefix) {
  std::string material;
  for (const auto& [id, text] : prompts.entries()) {
    if (id.rfind(prefix, 0) == 0) material += id + "\n" + text + "\n";
  }
  return material;
}

}  // namespace detail

// Loaded inputs shared by the stages.
struct PipelineInputs {
  std::vector<Document> documents;
  Abbreviations abbreviations;
  std::vector<WordList> lists;
  std::unique_ptr<WordMatcher> matcher;
  PromptCatalog prompts;
  std::optional<ScoreModel> score_model;
  PrecheckLists prechecks = PrecheckLists::defaults();

  static PipelineInputs load(const PipelineConfig& cfg) {
    cfg.validate();
    PipelineInputs in;
    in.documents = load_corpus(cfg.corpus);
    if (cfg.abbreviations) in.abbreviations = Abbreviations::load(*cfg.abbreviations);
    in.lists = load_wordlists(cfg.wordlists, cfg.spec);
    in.matcher = std::make_unique<WordMatcher>(cfg.spec, in.lists, in.abbreviations);
    if (cfg.prompts_dir) in.prompts = PromptCatalog::with_overrides(*cfg.prompts_dir);
    if (cfg.stereotype_enabled) in.score_model = ScoreModel::load(cfg.score_model);
    if (cfg.precheck_dir) in.prechecks = PrecheckLists::load(*cfg.precheck_dir);
    return in;
  }
};

// One fingerprint per stage, each chained onto the previous one, so a change
// upstream invalidates everything after it.
inline std::vector<std::string> stage_fingerprints(const PipelineConfig& cfg,
                                                   const PipelineInputs& in) {
  std::map<std::string, std::string> material;
  material["segment"] = llm::sha256_hex(detail::read_file(cfg.corpus)) +
                        nlohmann::json(in.abbreviations.entries()).dump();
  material["match"] = nlohmann::json(cfg.spec).dump() + nlohmann::json(in.lists).dump();
  const bool st = cfg.stereotype_enabled;
  material["detect"] = nlohmann::json{{"enabled", st},
                                      {"max_tokens", cfg.stereotype.max_tokens},
                                      {"model", cfg.endpoint("detection").model},
                                      {"prompts", detail::prompt_digest(in.prompts, "detect.")}}
                           .dump();
  material["assess"] = nlohmann::json{{"enabled", st},
                                      {"model", cfg.endpoint("assessment").model},
                                      {"prompts", detail::prompt_digest(in.prompts, "assess.")}}
                           .dump();
  material["filter"] =
      nlohmann::json{{"enabled", st},
                     {"threshold", cfg.stereotype.threshold},
                     {"model", in.score_model ? in.score_model->to_json() : nlohmann::json()}}
          .dump();
  material["cda"] = nlohmann::json{{"config", cfg.cda},
                                   {"political", in.prechecks.political()},
                                   {"historical", in.prechecks.historical()},
                                   {"selection", cfg.endpoint("selection").model},
                                   {"verification", cfg.endpoint("verification").model},
                                   {"prompts", detail::prompt_digest(in.prompts, "cda.")}}
                        .dump();
  std::vector<std::string> out;
  std::string prev;
  for (const auto& stage : pipeline_stages()) {
    prev = llm::sha256_hex(prev + "\n" + stage + "\n" + material[stage]);
    out.push_back(prev);
  }
  return out;
}

// Runs the stages up to and including `last`. Stages whose stamp in
// stages.json matches are skipped; the first mismatch and everything after
// it rerun.
inline PipelineResult run_pipeline(const PipelineConfig& cfg, const PipelineHooks& hooks = {},
                                   std::string_view last = "final") {
  const auto started = std::chrono::steady_clock::now();
  const std::string started_at = detail::utc_now();
  const std::size_t last_index = stage_index(last);
  PipelineInputs in = PipelineInputs::load(cfg);
  const auto fingerprints = stage_fingerprints(cfg, in);
  const fs::path out(cfg.output);
  fs::create_directories(out);
  const fs::path store_path = out / "metadata.jsonl";
  const fs::path stamps_path = out / "stages.json";

  std::vector<StageStamp> stamps = detail::read_stamps(stamps_path);
  std::size_t resume = 0;
  if (fs::exists(store_path)) {
    while (resume < stamps.size() && resume <= last_index &&
           stamps[resume] == StageStamp{pipeline_stages()[resume], fingerprints[resume]}) {
      ++resume;
    }
  }
  stamps.resize(resume);
  std::vector<SentenceEntity> entities;
  if (resume > 0) entities = load_store(store_path.string());

  llm::Transcript transcript =
      cfg.transcript.path.empty()
          ? llm::Transcript()
          : llm::Transcript::load(cfg.transcript.path,
                                  cfg.transcript.mode == llm::TranscriptMode::kReplay);
  struct StageClient {
    std::unique_ptr<llm::ChatClient> inner;
    std::unique_ptr<llm::TranscriptClient> client;
    llm::Endpoint endpoint;
  };
  std::map<std::string, StageClient> clients;
  auto endpoint = [&](const std::string& name) -> const llm::Endpoint& {
    auto it = clients.find(name);
    if (it != clients.end()) return it->second.endpoint;
    const auto ec = cfg.endpoint(name);
    StageClient sc;
    if (cfg.transcript.mode != llm::TranscriptMode::kReplay && hooks.live_client) {
      sc.inner = hooks.live_client(ec);
    }
    sc.client = std::make_unique<llm::TranscriptClient>(transcript, cfg.transcript.mode,
                                                        sc.inner.get());
    sc.endpoint = llm::Endpoint{sc.client.get(), ec.model, static_cast<std::size_t>(ec.parallelism)};
    return clients.emplace(name, std::move(sc)).first->second.endpoint;
  };
  auto say = [&](const std::string& m) {
    if (hooks.progress) hooks.progress(m);
  };

  PipelineResult result;
  nlohmann::json timing = nlohmann::json::object();
  for (std::size_t i = 0; i < resume; ++i) result.skipped.push_back(pipeline_stages()[i]);
  const WordMatcher& matcher = *in.matcher;
  for (std::size_t i = resume; i <= last_index; ++i) {
    const std::string& stage = pipeline_stages()[i];
    const auto t0 = std::chrono::steady_clock::now();
    say("stage " + stage);
    if (stage == "segment") {
      entities = segment_corpus(in.documents, in.abbreviations, cfg.workers);
    } else if (stage == "match") {
      match_all(entities, matcher, cfg.workers);
      detail::write_file(out / "repbias_report.json",
                         detail::dump(emit_report(cfg.spec, entities)));
      const auto freq = entry_counts(entities);
      std::ostringstream csv;
      write_cumulative_csv(csv, cumulative_dr(sort_by_frequency(in.lists, freq), freq));
      detail::write_file(out / "cumulative_dr.csv", csv.str());
    } else if (stage == "detect") {
      if (cfg.stereotype_enabled) {
        const auto s = run_detection(entities, endpoint("detection"), cfg.stereotype,
                                     in.abbreviations, in.prompts);
        say("  flagged " + std::to_string(s.flagged) + " of " + std::to_string(s.candidates));
      } else {
        for (auto& e : entities) {
          e.metadata.potential_stereotype = false;
          e.metadata.detection_status.reset();
        }
      }
    } else if (stage == "assess") {
      if (cfg.stereotype_enabled) {
        run_assessment(entities, endpoint("assessment"), in.prompts);
      } else {
        for (auto& e : entities) {
          e.metadata.linguistic_indicators.reset();
          e.metadata.assessment_status.reset();
        }
      }
    } else if (stage == "filter") {
      if (cfg.stereotype_enabled) {
        const auto s = filter(entities, *in.score_model, cfg.stereotype);
        say("  removed " + std::to_string(s.removed));
      } else {
        for (auto& e : entities) {
          e.metadata.score_scsc.reset();
          e.metadata.remove_sentence = false;
        }
      }
    } else if (stage == "cda") {
      const llm::Endpoint* sel = nullptr;
      const llm::Endpoint* ver = nullptr;
      if (cfg.cda.mode == CdaMode::kGc) {
        sel = &endpoint("selection");
        ver = &endpoint("verification");
      }
      const auto report =
          run_cda(entities, matcher, in.lists, cfg.cda, in.prechecks, sel, ver, in.prompts);
      detail::write_file(out / "cda_report.json", detail::dump(report));
      say("  substituted " + std::to_string(report.substituted));
    } else if (stage == "build") {
      std::ostringstream buf;
      write_corpus(buf, build_debiased(entities, in.documents));
      detail::write_file(out / "debiased.jsonl", buf.str());
    } else if (stage == "final") {
      std::vector<SentenceEntity> kept;
      for (const auto& e : entities) {
        if (e.metadata.remove_sentence) continue;
        SentenceEntity copy;
        copy.doc_id = e.doc_id;
        copy.sent_id = e.sent_id;
        copy.text = e.metadata.text_cda.value_or(e.text);
        match_sentence(copy, matcher);
        kept.push_back(std::move(copy));
      }
      detail::write_file(out / "repbias_report_after.json",
                         detail::dump(emit_report(cfg.spec, kept)));
      const auto summary = report_summary(entities, matcher, in.lists);
      detail::write_file(out / "summary.json", detail::dump(summary));
      detail::write_file(out / "summary.md", format_summary_table({{cfg.spec.attribute, summary}}));
    }
    stamps.push_back(StageStamp{stage, fingerprints[i]});
    if (cfg.checkpoint || i == last_index) {
      save_store(store_path.string(), entities);
      detail::write_file(stamps_path, detail::dump(nlohmann::json{{"stages", stamps}}));
    }
    timing["stages"][stage] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.ran.push_back(stage);
  }

  result.summary = report_summary(entities, matcher, in.lists);
  nlohmann::json stage_status = nlohmann::json::array();
  for (const auto& s : result.skipped) stage_status.push_back({{"name", s}, {"status", "resumed"}});
  for (const auto& s : result.ran) stage_status.push_back({{"name", s}, {"status", "ran"}});
  nlohmann::json artifacts = nlohmann::json::object();
  std::vector<fs::path> files;
  for (const auto& f : fs::directory_iterator(out)) {
    if (f.is_regular_file() && f.path().filename() != "manifest.json") files.push_back(f.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    artifacts[f.filename().string()] = llm::sha256_hex(detail::read_file(f.string()));
  }
  timing["started_at"] = started_at;
  timing["finished_at"] = detail::utc_now();
  timing["seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  nlohmann::json manifest{{"tool", "debias"},
                          {"version", kToolVersion},
                          {"prompt_catalog", kPromptCatalogVersion},
                          {"score_model", in.score_model ? in.score_model->version() : ""},
                          {"attribute", cfg.spec.attribute},
                          {"seed", cfg.cda.rng_seed},
                          {"transcript_mode", cfg.transcript.mode == llm::TranscriptMode::kReplay
                                                  ? "replay"
                                              : cfg.transcript.mode == llm::TranscriptMode::kRecord
                                                  ? "record"
                                                  : "live"},
                          {"config", cfg.raw},
                          {"stages", stage_status},
                          {"artifacts", artifacts},
                          {"timing", timing}};
  detail::write_file(out / "manifest.json", detail::dump(manifest));
  return result;
}

}  // namespace debias

#endif  // DEBIAS_PIPELINE_HPP_
