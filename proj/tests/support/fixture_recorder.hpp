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

// Writes the committed LLM transcripts under tests/fixtures from the
// deterministic FixtureOracle. Transcript lines are sorted by key so a
// rerun is byte-identical whatever the dispatch order.

#ifndef DEBIAS_TESTS_FIXTURE_RECORDER_HPP_
#define DEBIAS_TESTS_FIXTURE_RECORDER_HPP_

#include <algorithm>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "debias/pipeline.hpp"
#include "debias/soct.hpp"
#include "debias/stereotype.hpp"
#include "fixture_oracle.hpp"

namespace debias::testing_support {

inline constexpr const char* kFixtureModel = "fixture";
inline constexpr std::size_t kSoctFixtureRuns = 5;

// (context, sentence) pairs sent to detection.
inline std::vector<std::pair<std::string, std::string>> stereotype_detection_inputs() {
  return {{kRainContext, kRainSentence},
          {kYoungWomenContext, kYoungWomenSentence},
          {kScienceContext, kScienceSentence}};
}

inline std::vector<std::string> stereotype_assessment_inputs() {
  return {kWivesSentence, kChildlessSentence, kOldWomenSentence};
}

// Config as committed next to the e2e corpus; paths are relative to it.
inline nlohmann::json e2e_config_json() {
  return {{"corpus", "corpus.jsonl"},
          {"attribute", "gender"},
          {"wordlists", "../../../data/wordlists"},
          {"stereotype", {{"threshold", 0.63}}},
          {"cda", {{"mode", "gc"}, {"rng_seed", 7}}},
          {"llm", {{"default", {{"model", kFixtureModel}, {"parallelism", 2}}}}},
          {"transcript", {{"mode", "replay"}, {"path", "transcript.jsonl"}}},
          {"output", "run"}};
}

inline void sort_transcript(const fs::path& path) {
  std::vector<std::string> lines;
  {
    std::ifstream in(path, std::ios::binary);
    for (std::string line; std::getline(in, line);) {
      if (!line.empty()) lines.push_back(line);
    }
  }
  std::sort(lines.begin(), lines.end());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& l : lines) out << l << '\n';
}

class Recorder {
 public:
  explicit Recorder(const fs::path& transcript_path) : path_(transcript_path) {
    fs::remove(path_);
    transcript_ = llm::Transcript::load(path_.string(), false);
    client_ = std::make_unique<llm::TranscriptClient>(transcript_, llm::TranscriptMode::kRecord,
                                                      &oracle_);
  }
  ~Recorder() { sort_transcript(path_); }

  llm::Endpoint endpoint(std::size_t parallelism = 1) {
    return llm::Endpoint{client_.get(), kFixtureModel, parallelism};
  }

 private:
  fs::path path_;
  FixtureOracle oracle_;
  llm::Transcript transcript_;
  std::unique_ptr<llm::TranscriptClient> client_;
};

inline void record_stereotype(const fs::path& dir) {
  fs::create_directories(dir);
  Recorder rec(dir / "transcript.jsonl");
  const auto ep = rec.endpoint();
  for (const auto& [context, sentence] : stereotype_detection_inputs()) {
    detect(context, sentence, ep);
  }
  for (const auto& s : stereotype_assessment_inputs()) assess(s, ep);
}

inline void record_soct(const fs::path& dir) {
  fs::create_directories(dir);
  Recorder rec(dir / "transcript.jsonl");
  SoctConfig cfg;
  cfg.runs_per_template = kSoctFixtureRuns;
  run_probe(cfg, rec.endpoint(4));
}

inline void record_e2e(const fs::path& dir) {
  fs::create_directories(dir);
  save_corpus((dir / "corpus.jsonl").string(), e2e_documents());
  std::ofstream(dir / "config.json") << e2e_config_json().dump(2) << '\n';

  auto j = e2e_config_json();
  j["wordlists"] = std::string(DEBIAS_DATA_DIR) + "/wordlists";
  j["transcript"]["mode"] = "record";
  const fs::path scratch = dir / ".record";
  fs::remove_all(scratch);
  j["output"] = scratch.string();
  const auto transcript = dir / "transcript.jsonl";
  fs::remove(transcript);
  FixtureOracle oracle;
  PipelineHooks hooks;
  hooks.live_client = [&oracle](const llm::EndpointConfig&) {
    return std::make_unique<llm::FunctionClient>(
        [&oracle](const llm::ChatRequest& r) { return oracle.complete(r); });
  };
  run_pipeline(PipelineConfig::from_json(j, dir), hooks);
  fs::remove_all(scratch);
  sort_transcript(transcript);
}

inline void record_all(const fs::path& root) {
  record_stereotype(root / "stereotype");
  record_soct(root / "soct");
  record_e2e(root / "e2e");
}

}  // namespace debias::testing_support

#endif  // DEBIAS_TESTS_FIXTURE_RECORDER_HPP_
