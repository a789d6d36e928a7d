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

#include "debias/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fixture_oracle.hpp"
#include "gtest/gtest.h"

namespace debias {
namespace {

using testing_support::FixtureOracle;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("debias_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    save_corpus((dir_ / "corpus.jsonl").string(), testing_support::e2e_documents());
  }
  void TearDown() override { fs::remove_all(dir_); }

  nlohmann::json config_json(const std::string& mode = "record") const {
    return nlohmann::json{
        {"corpus", "corpus.jsonl"},
        {"attribute", "gender"},
        {"wordlists", DEBIAS_DATA_DIR "/wordlists"},
        {"stereotype", {{"threshold", 0.63}, {"score_model", DEBIAS_DATA_DIR "/score_model.json"}}},
        {"cda", {{"mode", "gc"}, {"rng_seed", 7}}},
        {"llm", {{"default", {{"model", "fixture"}, {"parallelism", 2}}}}},
        {"transcript", {{"mode", mode}, {"path", "transcript.jsonl"}}},
        {"output", "run"}};
  }

  PipelineConfig config(const std::string& mode = "record", const std::string& out = "run") {
    auto j = config_json(mode);
    j["output"] = out;
    return PipelineConfig::from_json(j, dir_);
  }

  PipelineHooks hooks() {
    PipelineHooks h;
    h.live_client = [this](const llm::EndpointConfig&) {
      return std::make_unique<llm::FunctionClient>(
          [this](const llm::ChatRequest& r) { return oracle_.complete(r); });
    };
    return h;
  }

  fs::path dir_;
  FixtureOracle oracle_;
};

TEST_F(PipelineTest, EndToEndArtifacts) {
  const auto result = run_pipeline(config(), hooks());
  EXPECT_EQ(result.ran, pipeline_stages());
  for (const char* f : {"manifest.json", "metadata.jsonl", "stages.json", "repbias_report.json",
                        "cumulative_dr.csv", "cda_report.json", "debiased.jsonl",
                        "repbias_report_after.json", "summary.json", "summary.md"}) {
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  }
  const auto& s = result.summary;
  EXPECT_EQ(s.removed, 1u);
  EXPECT_EQ(s.potential_stereotypes, 3u);
  EXPECT_EQ(s.assessment_failed, 1u);
  EXPECT_GT(s.substituted, 0u);
  EXPECT_LT(s.dr_after, s.dr_before);
  EXPECT_EQ(s.skipped.at("political"), 1u);
  EXPECT_EQ(s.skipped.at("year"), 1u);

  // The rejected counterfactual and the prechecked sentences keep their text.
  for (const auto& e : load_store((dir_ / "run" / "metadata.jsonl").string())) {
    if (e.text.find("beard") != std::string::npos || e.metadata.skip_reason) {
      EXPECT_FALSE(e.metadata.text_cda.has_value()) << e.text;
    }
  }
  const auto debiased = load_corpus((dir_ / "run" / "debiased.jsonl").string());
  ASSERT_EQ(debiased.size(), 6u);
  EXPECT_EQ(debiased[1].text.find("Young women"), std::string::npos);

  // Recompute the after-DR from the debiased corpus as an independent check.
  const auto spec = *builtin_spec("gender");
  const auto lists = load_wordlists(DEBIAS_DATA_DIR "/wordlists", spec);
  const WordMatcher matcher(spec, lists);
  auto es = segment_corpus(debiased, Abbreviations());
  match_all(es, matcher);
  EXPECT_DOUBLE_EQ(compute_dr(count_groups(spec, es)), s.dr_after);
}

// Manifest minus the fields that legitimately differ between a recording
// and its replay.
nlohmann::json comparable(const fs::path& manifest) {
  auto j = nlohmann::json::parse(slurp(manifest));
  j.erase("timing");
  j.erase("transcript_mode");
  j["config"].erase("transcript");
  return j;
}

TEST_F(PipelineTest, ReplayReproducesRecord) {
  run_pipeline(config("record", "a"), hooks());
  const auto calls = oracle_.calls();
  run_pipeline(config("replay", "b"), PipelineHooks{});
  EXPECT_EQ(oracle_.calls(), calls);
  for (const auto& f : fs::directory_iterator(dir_ / "a")) {
    const auto name = f.path().filename();
    if (name == "manifest.json") {
      EXPECT_EQ(comparable(f.path()), comparable(dir_ / "b" / name));
    } else {
      EXPECT_EQ(slurp(f.path()), slurp(dir_ / "b" / name)) << name;
    }
  }
}

TEST_F(PipelineTest, ResumeSkipsCompletedStages) {
  run_pipeline(config(), hooks(), "filter");
  const auto detect_calls = oracle_.calls("stereotype.detect");
  EXPECT_GT(detect_calls, 0u);
  auto cfg = config();
  cfg.cda.rng_seed = 99;
  const auto result = run_pipeline(cfg, hooks());
  EXPECT_EQ(result.ran, (std::vector<std::string>{"cda", "build", "final"}));
  EXPECT_EQ(oracle_.calls("stereotype.detect"), detect_calls);
  EXPECT_GT(oracle_.calls("cda.verify"), 0u);
}

TEST_F(PipelineTest, ChangedThresholdRerunsFromFilter) {
  run_pipeline(config(), hooks());
  auto cfg = config();
  cfg.stereotype.threshold = 0.5;
  const auto result = run_pipeline(cfg, hooks());
  EXPECT_EQ(result.skipped, (std::vector<std::string>{"segment", "match", "detect", "assess"}));
  EXPECT_EQ(result.summary.removed, 2u);
}

TEST_F(PipelineTest, RerunIsByteIdentical) {
  run_pipeline(config(), hooks());
  const auto store = slurp(dir_ / "run" / "metadata.jsonl");
  const auto debiased = slurp(dir_ / "run" / "debiased.jsonl");
  fs::remove(dir_ / "run" / "stages.json");
  const auto result = run_pipeline(config("replay"), PipelineHooks{});
  EXPECT_EQ(result.ran.size(), pipeline_stages().size());
  EXPECT_EQ(slurp(dir_ / "run" / "metadata.jsonl"), store);
  EXPECT_EQ(slurp(dir_ / "run" / "debiased.jsonl"), debiased);
}

TEST_F(PipelineTest, StagesOnlyWriteTheirOwnFields) {
  run_pipeline(config(), hooks());
  const fs::path run = dir_ / "run";
  const auto full = load_store((run / "metadata.jsonl").string());
  const auto stamps = nlohmann::json::parse(slurp(run / "stages.json"))["stages"];
  const auto& owners = field_ownership();
  for (std::size_t i = 1; i < pipeline_stages().size(); ++i) {
    const auto& stage = pipeline_stages()[i];
    // Blank the stage's own fields, rerun just that stage, compare.
    std::vector<SentenceEntity> blanked;
    for (const auto& e : full) {
      auto j = nlohmann::json(e);
      for (const auto& f : owners.at(stage)) j["metadata"].erase(f);
      blanked.push_back(j.get<SentenceEntity>());
    }
    save_store((run / "metadata.jsonl").string(), blanked);
    nlohmann::json kept = nlohmann::json::array();
    for (std::size_t k = 0; k < i; ++k) kept.push_back(stamps[k]);
    std::ofstream(run / "stages.json") << nlohmann::json{{"stages", kept}}.dump();
    const auto result = run_pipeline(config("replay"), PipelineHooks{}, stage);
    ASSERT_EQ(result.ran, std::vector<std::string>{stage});
    const auto after = load_store((run / "metadata.jsonl").string());
    ASSERT_EQ(after.size(), full.size());
    for (std::size_t k = 0; k < full.size(); ++k) {
      EXPECT_EQ(nlohmann::json(after[k]), nlohmann::json(full[k])) << stage << " " << full[k].text;
    }
  }
}

TEST_F(PipelineTest, MissingWordListFailsBeforeProcessing) {
  fs::create_directories(dir_ / "lists");
  fs::copy_file(DEBIAS_DATA_DIR "/wordlists/gender/female.json", dir_ / "lists" / "female.json");
  auto j = config_json();
  j["wordlists"] = "lists";
  const auto cfg = PipelineConfig::from_json(j, dir_);
  EXPECT_THROW(run_pipeline(cfg, hooks()), PipelineError);
  EXPECT_FALSE(fs::exists(dir_ / "run"));
  EXPECT_EQ(oracle_.calls(), 0u);
}

TEST_F(PipelineTest, ConfigPathsAndEndpoints) {
  auto j = config_json();
  j["llm"]["verification"] = {{"model", "checker"}};
  const auto cfg = PipelineConfig::from_json(j, dir_);
  EXPECT_EQ(cfg.corpus, (dir_ / "corpus.jsonl").lexically_normal().string());
  EXPECT_EQ(cfg.endpoint("verification").model, "checker");
  EXPECT_EQ(cfg.endpoint("verification").parallelism, 2);
  EXPECT_EQ(cfg.endpoint("selection").model, "fixture");
  EXPECT_FALSE(cfg.raw.contains("output"));
  j["attribute"] = "height";
  EXPECT_THROW(PipelineConfig::from_json(j, dir_), PipelineError);
}

const WordMatcher& gender_matcher() {
  static const auto spec = *builtin_spec("gender");
  static const auto lists = load_wordlists(DEBIAS_DATA_DIR "/wordlists", spec);
  static const WordMatcher m(spec, lists);
  return m;
}

TEST(SummaryTest, EmptyStoreIsAllZero) {
  const auto s = report_summary({}, gender_matcher(), {});
  EXPECT_EQ(s.sentences, 0u);
  EXPECT_EQ(s.dr_before, 0.0);
  EXPECT_EQ(s.dr_after, 0.0);
  EXPECT_EQ(s.removed + s.substituted + s.potential_stereotypes, 0u);
}

TEST(SummaryTest, HandBuiltStore) {
  std::vector<SentenceEntity> es(4);
  for (std::size_t i = 0; i < es.size(); ++i) {
    es[i].doc_id = "d";
    es[i].sent_id = i;
    es[i].text = "The man ran.";
    match_sentence(es[i], gender_matcher());
  }
  es[0].metadata.remove_sentence = true;
  es[1].metadata.remove_sentence = true;
  es[2].metadata.text_cda = "The woman ran.";
  const auto s = report_summary(es, gender_matcher(), {});
  EXPECT_EQ(s.removed, 2u);
  EXPECT_EQ(s.substituted, 1u);
  EXPECT_EQ(s.counts_before.at("male"), 4u);
  EXPECT_EQ(s.counts_after.at("male"), 1u);
  EXPECT_EQ(s.counts_after.at("female"), 1u);
  EXPECT_EQ(s.dr_after, 0.0);
}

TEST(SummaryTest, TableRowShape) {
  PipelineSummary s;
  s.attribute = "gender";
  s.list_sizes = {{"female", 142}, {"male", 142}};
  s.relevant_sentences = 509658;
  s.counts_before = {{"female", 235461}, {"male", 592243}};
  s.dr_before = compute_dr(GroupCounts{"gender", s.counts_before, 0});
  s.removed = 13452;
  s.substituted = 80279;
  s.dr_after = 0.08;
  const auto table = format_summary_table({{"SH-D gender (GC-CDA)", s}});
  EXPECT_NE(table.find("| SH-D gender (GC-CDA) | Female: 142, Male: 142 | 509,658 | "
                       "Female: 235,461, Male: 592,243 | DR_gender = 0.22 | 13,452 | 80,279 | "
                       "DR_gender = 0.08 |"),
            std::string::npos)
      << table;
}

}  // namespace
}  // namespace debias
