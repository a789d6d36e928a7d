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

// Command-line front end.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "debias/cda.hpp"
#include "debias/http_client.hpp"
#include "debias/llm.hpp"
#include "debias/pipeline.hpp"
#include "debias/soct.hpp"
#include "debias/wordlist.hpp"
#include "json.hpp"

namespace {

using namespace debias;

struct Globals {
  std::string config = "debias.json";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> transcript_mode;
  std::optional<std::string> transcript_file;
  std::optional<std::string> out;
  bool quiet = false;
};

PipelineConfig load_config(const Globals& g) {
  auto cfg = PipelineConfig::load(g.config);
  if (g.seed) cfg.cda.rng_seed = *g.seed;
  if (g.transcript_mode) cfg.transcript.mode = llm::parse_transcript_mode(*g.transcript_mode);
  if (g.transcript_file) cfg.transcript.path = *g.transcript_file;
  if (g.out) cfg.output = *g.out;
  return cfg;
}

PipelineHooks hooks(const Globals& g) {
  PipelineHooks h;
  h.live_client = [](const llm::EndpointConfig& ec) -> std::unique_ptr<llm::ChatClient> {
    return std::make_unique<llm::HttpChatClient>(ec);
  };
  if (!g.quiet) h.progress = [](std::string_view m) { std::cerr << m << '\n'; };
  return h;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return nlohmann::json::parse(in);
}

// Client stack for the standalone LLM commands (wordlist gen, soct).
struct Session {
  llm::Transcript transcript;
  std::unique_ptr<llm::ChatClient> live;
  std::unique_ptr<llm::TranscriptClient> client;
  llm::Endpoint endpoint;

  Session(const Globals& g, const std::optional<std::string>& endpoint_file) {
    llm::EndpointConfig ec;
    if (endpoint_file) ec = read_json(*endpoint_file).get<llm::EndpointConfig>();
    const auto mode = llm::parse_transcript_mode(g.transcript_mode.value_or("live"));
    const std::string path = g.transcript_file.value_or("");
    if (mode == llm::TranscriptMode::kReplay && path.empty()) {
      throw std::runtime_error("replay needs --transcript-file");
    }
    if (!path.empty()) transcript = llm::Transcript::load(path, mode == llm::TranscriptMode::kReplay);
    if (mode != llm::TranscriptMode::kReplay) live = std::make_unique<llm::HttpChatClient>(ec);
    client = std::make_unique<llm::TranscriptClient>(transcript, mode, live.get());
    endpoint = llm::Endpoint{client.get(), ec.model, static_cast<std::size_t>(ec.parallelism)};
  }
};

AttributeSpec attribute_spec(const std::string& name, const std::vector<std::string>& groups) {
  if (!groups.empty()) {
    AttributeSpec spec{name, groups};
    spec.validate();
    return spec;
  }
  auto spec = builtin_spec(name);
  if (!spec) throw std::runtime_error("unknown attribute '" + name + "'; pass --groups");
  return *spec;
}

void print_summary(const PipelineConfig& cfg, const PipelineSummary& s) {
  std::cout << format_summary_table({{cfg.spec.attribute, s}});
}

int run_stages(const Globals& g, const std::string& last,
               const std::function<void(PipelineConfig&)>& adjust = {}) {
  auto cfg = load_config(g);
  if (adjust) adjust(cfg);
  const auto result = run_pipeline(cfg, hooks(g), last);
  if (!g.quiet) {
    for (const auto& s : result.skipped) std::cerr << "resumed " << s << '\n';
  }
  if (last == "final") print_summary(cfg, result.summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corpus bias detection and mitigation"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Pipeline config (JSON)");
  app.add_option("--seed", g.seed, "RNG seed for CDA");
  app.add_option("--transcript", g.transcript_mode, "record, replay or live")
      ->check(CLI::IsMember({"record", "replay", "live"}));
  app.add_option("--transcript-file", g.transcript_file, "Transcript JSONL path");
  app.add_option("--out", g.out, "Run directory (overrides the config)");
  app.add_flag("-q,--quiet", g.quiet, "No progress output");

  std::string until = "final";
  auto* run = app.add_subcommand("run", "Run the full pipeline (resumes completed stages)");
  run->add_option("--until", until, "Last stage to run")
      ->check(CLI::IsMember(pipeline_stages()));

  auto* scan = app.add_subcommand("scan", "Segment, match and write the DR report");

  auto* stereo = app.add_subcommand("stereotype", "Stereotype stages");
  stereo->require_subcommand(1);
  auto* detect = stereo->add_subcommand("detect", "LLM stereotype detection");
  auto* assess = stereo->add_subcommand("assess", "Linguistic indicator assessment");
  auto* filt = stereo->add_subcommand("filter", "Score and flag strong stereotypes");
  std::optional<double> threshold;
  filt->add_option("--threshold", threshold, "Removal threshold");

  auto* cda = app.add_subcommand("cda", "Counterfactual data augmentation");
  std::optional<std::string> cda_mode;
  std::optional<std::string> cda_attribute;
  cda->add_option("--mode", cda_mode, "base or gc")->check(CLI::IsMember({"base", "gc"}));
  cda->add_option("--attribute", cda_attribute, "Built-in attribute to balance");

  auto* build = app.add_subcommand("build", "Write the debiased corpus");

  auto* report = app.add_subcommand("report", "Summarize a run directory");
  bool report_json = false;
  report->add_flag("--json", report_json, "Print the summary as JSON");

  auto* soct = app.add_subcommand("soct", "Occupation completion probe");
  std::optional<std::string> soct_endpoint;
  std::size_t soct_runs = 100;
  std::string soct_out = "soct.json";
  std::optional<std::string> soct_templates;
  std::string soct_lists = std::string(DEBIAS_DATA_DIR) + "/wordlists";
  soct->add_option("--endpoint", soct_endpoint, "Endpoint config (JSON)");
  soct->add_option("--runs", soct_runs, "Completions per template")->check(CLI::PositiveNumber);
  soct->add_option("--out", soct_out, "Report path");
  soct->add_option("--templates", soct_templates, "Template file, one per line");
  soct->add_option("--wordlists", soct_lists, "Gender word list directory");

  auto* wl = app.add_subcommand("wordlist", "Word list generation and curation");
  wl->require_subcommand(1);
  std::string wl_attribute;
  std::vector<std::string> wl_groups;
  std::optional<std::string> wl_params;
  std::optional<std::string> wl_endpoint;
  std::string wl_out;
  auto* gen = wl->add_subcommand("gen", "Generate raw lists with an LLM");
  gen->add_option("--attribute", wl_attribute)->required();
  gen->add_option("--groups", wl_groups, "Groups for a custom attribute");
  gen->add_option("--params", wl_params, "Generation parameters and few-shots (JSON)");
  gen->add_option("--endpoint", wl_endpoint, "Endpoint config (JSON)");
  gen->add_option("--out", wl_out, "Output directory")->required();

  std::string freq_lists;
  std::string freq_corpus;
  std::optional<std::string> freq_csv;
  auto* freq = wl->add_subcommand("freq", "Drop unseen words and keep the top k");
  freq->add_option("--attribute", wl_attribute)->required();
  freq->add_option("--groups", wl_groups, "Groups for a custom attribute");
  freq->add_option("--lists", freq_lists, "Raw list directory")->required();
  freq->add_option("--corpus", freq_corpus, "Corpus JSONL")->required();
  freq->add_option("--params", wl_params, "Selection parameters (JSON)");
  freq->add_option("--out", wl_out, "Output directory")->required();
  freq->add_option("--csv", freq_csv, "Write word frequencies here");

  std::string review_list;
  std::optional<std::string> review_decisions;
  std::optional<std::string> review_audit;
  auto* review = wl->add_subcommand("review", "Human validation of one list");
  review->add_option("--list", review_list, "Word list JSON")->required();
  review->add_option("--decisions", review_decisions, "Apply a decisions file instead of prompting");
  review->add_option("--audit", review_audit, "Where interactive decisions are logged");
  review->add_option("--out", wl_out, "Reviewed list path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_stages(g, until);
    if (scan->parsed()) return run_stages(g, "match");
    if (detect->parsed()) return run_stages(g, "detect");
    if (assess->parsed()) return run_stages(g, "assess");
    if (filt->parsed()) {
      return run_stages(g, "filter", [&](PipelineConfig& c) {
        if (threshold) c.stereotype.threshold = *threshold;
      });
    }
    if (cda->parsed()) {
      return run_stages(g, "cda", [&](PipelineConfig& c) {
        if (cda_mode) c.cda.mode = parse_cda_mode(*cda_mode);
        if (cda_attribute) c.spec = attribute_spec(*cda_attribute, {});
      });
    }
    if (build->parsed()) return run_stages(g, "build");
    if (report->parsed()) {
      const auto cfg = load_config(g);
      const auto in = PipelineInputs::load(cfg);
      const auto store = load_store((fs::path(cfg.output) / "metadata.jsonl").string());
      const auto s = report_summary(store, *in.matcher, in.lists);
      if (report_json) {
        std::cout << nlohmann::json(s).dump(2) << '\n';
      } else {
        print_summary(cfg, s);
      }
      return 0;
    }
    if (soct->parsed()) {
      SoctConfig sc;
      sc.runs_per_template = soct_runs;
      if (soct_templates) sc.templates = load_soct_templates(*soct_templates);
      Session session(g, soct_endpoint);
      const auto spec = *builtin_spec("gender");
      const WordMatcher matcher(spec, load_wordlists(soct_lists, spec));
      const auto completions = run_probe(sc, session.endpoint);
      const auto r = debias::report(completions, sc, matcher);
      std::ofstream(soct_out) << nlohmann::json(r).dump(2) << '\n';
      for (const auto& h : r.halves) {
        std::cout << h.label << ": DR " << h.dr << " (" << h.direction << "), unclassified "
                  << h.unclassified << ", failed " << h.failed << '\n';
      }
      return 0;
    }
    if (gen->parsed()) {
      const auto spec = attribute_spec(wl_attribute, wl_groups);
      GenerationParams params;
      if (wl_params) params = read_json(*wl_params).get<GenerationParams>();
      Session session(g, wl_endpoint);
      const auto raw = generate_raw(spec, params, session.endpoint);
      const auto expanded = expand_completeness(spec, raw, session.endpoint);
      fs::create_directories(wl_out);
      for (const auto& grp : spec.groups) {
        WordList list{spec.attribute, grp, {}, {}};
        if (auto it = expanded.words.find(grp); it != expanded.words.end()) list.entries = it->second;
        if (auto it = expanded.counterpart.find(grp); it != expanded.counterpart.end()) {
          list.counterpart = it->second;
        }
        save_wordlist((fs::path(wl_out) / (grp + ".json")).string(), list);
        std::cout << grp << ": " << list.entries.size() << " words\n";
      }
      return 0;
    }
    if (freq->parsed()) {
      const auto spec = attribute_spec(wl_attribute, wl_groups);
      GenerationParams params;
      if (wl_params) params = read_json(*wl_params).get<GenerationParams>();
      auto lists = load_wordlists(freq_lists, spec);
      std::vector<std::string> words;
      for (const auto& l : lists) words.insert(words.end(), l.entries.begin(), l.entries.end());
      const auto counts = compute_frequencies(words, load_corpus(freq_corpus));
      std::vector<WordList> selected;
      for (const auto& l : lists) selected.push_back(filter_and_select(l, counts, params));
      prune_counterparts(selected);
      fs::create_directories(wl_out);
      for (const auto& l : selected) {
        save_wordlist((fs::path(wl_out) / (l.group + ".json")).string(), l);
        std::cout << l.group << ": " << l.entries.size() << " words\n";
      }
      if (freq_csv) {
        std::ofstream csv(*freq_csv);
        csv << "group,word,count\n";
        for (const auto& l : lists) {
          for (const auto& w : l.entries) csv << l.group << ',' << w << ',' << counts.at(w) << '\n';
        }
      }
      return 0;
    }
    if (review->parsed()) {
      const auto list = load_wordlist(review_list);
      std::optional<WordList> result;
      if (review_decisions) {
        result = apply_decisions(list, load_decisions(*review_decisions));
      } else {
        std::ofstream audit(review_audit.value_or(wl_out + ".decisions.jsonl"), std::ios::app);
        result = review_interactive(list, std::cin, std::cout, audit);
      }
      if (!result) {
        std::cerr << "review incomplete; decisions so far are in the audit file\n";
        return 1;
      }
      save_wordlist(wl_out, *result);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
