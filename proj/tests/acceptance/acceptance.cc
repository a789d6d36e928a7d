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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fail. Everything runs offline against committed
// transcripts or in-process stubs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "debias/cda.hpp"
#include "debias/pipeline.hpp"
#include "debias/soct.hpp"
#include "debias/stereotype.hpp"
#include "fixture_oracle.hpp"
#include "fixture_recorder.hpp"

namespace debias {
namespace {

using Clock = std::chrono::steady_clock;
using testing_support::FixtureOracle;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

GroupCounts make_counts(const std::string& attribute,
                        std::vector<std::pair<std::string, std::uint64_t>> groups) {
  GroupCounts c;
  c.attribute = attribute;
  for (auto& [g, n] : groups) c.counts[g] = n;
  return c;
}

const AttributeSpec& gender() {
  static const AttributeSpec spec = *builtin_spec("gender");
  return spec;
}

const std::vector<WordList>& gender_lists() {
  static const auto lists = load_wordlists(DEBIAS_DATA_DIR "/wordlists", gender());
  return lists;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------

Outcome dr_reproduction() {
  Outcome o;
  struct Row {
    GroupCounts counts;
    double expected;
    double reported;
  };
  const std::vector<Row> rows = {
      {make_counts("gender", {{"female", 235461}, {"male", 592243}}), 0.2155, 0.22},
      {make_counts("age", {{"young", 42281}, {"middle", 6977}, {"old", 12101}}), 0.3557, 0.35},
      {make_counts("religion", {{"buddhism", 377},
                                {"christianity", 16725},
                                {"hinduism", 724},
                                {"islam", 5416},
                                {"judaism", 4227}}),
       0.4089, 0.41},
  };
  std::ostringstream d;
  for (const auto& r : rows) {
    const double dr = compute_dr(r.counts);
    o.require(std::abs(dr - r.expected) <= 0.0005, r.counts.attribute + " DR " + fmt("%.6f", dr));
    // Reported values carry two digits (0.3557 appears as 0.35).
    o.require(std::abs(dr - r.reported) < 0.01,
              r.counts.attribute + " is not within the reported two-digit value");
    constexpr int kCalls = 10000;
    volatile double sink = 0;
    const auto t0 = Clock::now();
    for (int i = 0; i < kCalls; ++i) sink = sink + compute_dr(r.counts);
    const double per_call_ms = seconds_since(t0) * 1000 / kCalls;
    o.require(per_call_ms < 1.0, r.counts.attribute + " took " + fmt("%.4f ms", per_call_ms));
    d << (d.tellp() > 0 ? " " : "") << r.counts.attribute << '=' << fmt("%.4f", dr);
  }
  if (o.pass) o.detail = d.str();
  return o;
}

Outcome dr_properties() {
  Outcome o;
  const auto t0 = Clock::now();
  std::size_t vectors = 0;
  for (std::size_t m : {2u, 3u, 5u}) {
    std::vector<std::uint64_t> c(m, 0);
    const double upper = static_cast<double>(m - 1) / static_cast<double>(m);
    while (true) {
      std::uint64_t total = 0;
      for (auto v : c) total += v;
      if (total > 0) {
        ++vectors;
        const double dr = dr_score(c).dr;
        o.require(dr >= 0.0 && dr <= upper, "bounds violated");
        const bool uniform = std::all_of(c.begin(), c.end(), [&](auto v) { return v == c[0]; });
        o.require((dr == 0.0) == uniform, "DR = 0 iff uniform violated");
        for (std::uint64_t k : {2u, 3u, 7u, 1000u}) {
          std::vector<std::uint64_t> scaled(c);
          for (auto& v : scaled) v *= k;
          o.require(dr_score(scaled).dr == dr, "scale invariance violated");
        }
      }
      std::size_t i = 0;
      while (i < m && c[i] == 6) c[i++] = 0;
      if (i == m) break;
      ++c[i];
    }
  }
  const double s = seconds_since(t0);
  o.require(s < 10.0, "took " + fmt("%.2f s", s));
  if (o.pass) o.detail = std::to_string(vectors) + " vectors in " + fmt("%.2f s", s);
  return o;
}

Outcome cumulative_convergence() {
  Outcome o;
  // Vocabulary: every gender entry in a seeded random rank order, drawn with
  // Zipf weights 1/r^2 into 10k sentences.
  std::mt19937_64 rng(11);
  std::vector<std::string> vocab;
  for (const auto& l : gender_lists()) {
    for (const auto& w : l.entries) {
      if (w.find_first_of(" -'") == std::string::npos) vocab.push_back(w);
    }
  }
  std::shuffle(vocab.begin(), vocab.end(), rng);
  std::vector<double> weights;
  for (std::size_t r = 1; r <= vocab.size(); ++r) weights.push_back(1.0 / (double(r) * double(r)));
  std::discrete_distribution<std::size_t> zipf(weights.begin(), weights.end());
  static const std::vector<std::string> filler = {"the", "walked", "to", "a", "market",
                                                  "quickly", "and", "saw", "bright", "sky"};
  std::uniform_int_distribution<std::size_t> pick(0, filler.size() - 1);
  std::bernoulli_distribution label(0.3);
  std::vector<Document> docs;
  std::string text;
  for (int s = 0; s < 10000; ++s) {
    std::string sentence;
    for (int t = 0; t < 7; ++t) {
      if (!sentence.empty()) sentence += ' ';
      sentence += label(rng) ? vocab[zipf(rng)] : filler[pick(rng)];
    }
    sentence += " today";
    sentence[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sentence[0])));
    text += (text.empty() ? "" : " ") + sentence + ".";
    if (s % 10 == 9) {
      docs.push_back({"z" + std::to_string(s / 10), text});
      text.clear();
    }
  }
  auto entities = segment_corpus(docs, Abbreviations());
  o.require(entities.size() == 10000, "segmented into " + std::to_string(entities.size()));
  const WordMatcher matcher(gender(), gender_lists());
  match_all(entities, matcher);
  const auto counts = entry_counts(entities);
  const auto sorted = sort_by_frequency(gender_lists(), counts);
  const auto series = cumulative_dr(sorted, counts);
  std::size_t settled = 0;  // first index after which every delta is < 1e-5
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (std::abs(series[i].dr - series[i - 1].dr) >= 1e-5) settled = i + 1;
  }
  o.require(settled < series.size(), "deltas never fall below 1e-5");
  o.require(series.back().dr == compute_dr(count_groups(gender(), entities)),
            "final cumulative point differs from corpus DR");

  auto extended = sorted;
  for (auto& l : extended) {
    for (int i = 0; i < 5; ++i) l.entries.push_back("zqxunseen" + l.group + std::to_string(i));
  }
  const auto series2 = cumulative_dr(extended, counts);
  o.require(series2.back().dr == series.back().dr, "zero-frequency words changed DR");
  auto rematched = entities;
  match_all(rematched, WordMatcher(gender(), extended));
  o.require(compute_dr(count_groups(gender(), rematched)) == series.back().dr,
            "zero-frequency words changed the rematched DR");
  if (o.pass) {
    o.detail = "settled at length " + std::to_string(settled) + " of " +
               std::to_string(series.size()) + ", DR " + fmt("%.4f", series.back().dr);
  }
  return o;
}

Outcome round_trip() {
  Outcome o;
  std::mt19937_64 rng(5);
  static const std::vector<std::string> pieces = {
      "word", "The", "man", "she", "Dr.", "e.g.", "U.S.", "Mr.", ".", "!", "?", "...", ",",
      "\"", "'", "(", ")", " ", "  ", "\n", "\n\n", "\t", "caf\xc3\xa9", "\xe2\x80\x94",
      "\xe2\x80\x9c", "\xe2\x80\x9d", "1984", "3.14", "A.", "ok?!", "end.", "x"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::uniform_int_distribution<int> len(0, 80);
  std::vector<Document> docs;
  for (int d = 0; d < 1000; ++d) {
    std::string text;
    for (int n = len(rng); n > 0; --n) {
      text += pieces[pick(rng)];
      if (rng() % 2) text += ' ';
    }
    docs.push_back({"r" + std::to_string(d), text});
  }
  const auto t0 = Clock::now();
  const auto entities = segment_corpus(docs, Abbreviations());
  const auto rebuilt = build_debiased(entities, docs);
  std::ostringstream a, b;
  write_corpus(a, docs);
  write_corpus(b, rebuilt);
  const double s = seconds_since(t0);
  o.require(a.str() == b.str(), "rebuilt corpus differs");
  o.require(s < 5.0, "took " + fmt("%.2f s", s));
  if (o.pass) o.detail = std::to_string(entities.size()) + " sentences, " + fmt("%.3f s", s);
  return o;
}

// Sets one scored indicator of `r` by feature name.
void set_feature(IndicatorRecord& r, const std::string& name, const std::string& value) {
  if (name == "has_category_label") r.has_category_label = value == "yes";
  else if (name == "target_type") r.target_type = *parse_indicator<TargetType>(value);
  else if (name == "connotation") r.connotation = *parse_indicator<Connotation>(value);
  else if (name == "gram_form") r.gram_form = *parse_indicator<GramForm>(value);
  else if (name == "ling_form") r.ling_form = *parse_indicator<LingForm>(value);
  else if (name == "situation") r.situation = *parse_indicator<Situation>(value);
  else if (name == "situation_evaluation") r.situation_evaluation = *parse_indicator<Evaluation>(value);
  else if (name == "generalization") r.generalization = *parse_indicator<Generalization>(value);
  else throw std::logic_error("unknown indicator " + name);
}

IndicatorRecord random_record(std::mt19937_64& rng) {
  IndicatorRecord r;
  for (const auto& [name, values] : indicator_schema()) {
    set_feature(r, name, values[rng() % values.size()]);
  }
  return r;
}

Outcome stereotype_gate() {
  Outcome o;
  auto transcript = llm::Transcript::load(DEBIAS_FIXTURE_DIR "/stereotype/transcript.jsonl", true);
  llm::TranscriptClient client(transcript, llm::TranscriptMode::kReplay, nullptr);
  const llm::Endpoint ep{&client, testing_support::kFixtureModel, 1};

  const auto rain = detect(testing_support::kRainContext, testing_support::kRainSentence, ep);
  const auto young =
      detect(testing_support::kYoungWomenContext, testing_support::kYoungWomenSentence, ep);
  o.require(std::holds_alternative<DetectionResult>(rain) &&
                !std::get<DetectionResult>(rain).stereotype,
            "rain sentence not classified as no");
  o.require(std::holds_alternative<DetectionResult>(young) &&
                std::get<DetectionResult>(young).stereotype,
            "young women sentence not classified as yes");

  const auto model = ScoreModel::load(DEBIAS_DATA_DIR "/score_model.json");
  StereotypeConfig cfg;
  cfg.threshold = 0.63;
  std::vector<SentenceEntity> entities;
  for (const auto& s : testing_support::stereotype_assessment_inputs()) {
    SentenceEntity e;
    e.doc_id = "f";
    e.sent_id = entities.size();
    e.text = s;
    e.metadata.relevant_sentence = true;
    e.metadata.potential_stereotype = true;
    entities.push_back(e);
  }
  const auto stats = run_assessment(entities, ep);
  o.require(stats.failed == 0, "assessment replay failed");
  filter(entities, model, cfg);
  std::set<std::string> removed;
  for (const auto& e : entities) {
    o.require(e.metadata.score_scsc.has_value(), "unscored fixture");
    if (!e.metadata.score_scsc) continue;
    o.require(e.metadata.remove_sentence == (*e.metadata.score_scsc > cfg.threshold),
              "removal does not match score > threshold");
    if (e.metadata.remove_sentence) removed.insert(e.text);
  }
  o.require(removed == std::set<std::string>{testing_support::kWivesSentence,
                                             testing_support::kOldWomenSentence},
            "wrong sentences removed at 0.63");

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SentenceEntity> es(40);
    for (auto& e : es) {
      e.metadata.potential_stereotype = true;
      e.metadata.linguistic_indicators = random_record(rng);
    }
    double a = unit(rng), b = unit(rng);
    if (a > b) std::swap(a, b);
    auto low = es;
    StereotypeConfig ca, cb;
    ca.threshold = a;
    cb.threshold = b;
    filter(low, model, ca);
    filter(es, model, cb);
    for (std::size_t i = 0; i < es.size(); ++i) {
      o.require(!es[i].metadata.remove_sentence || low[i].metadata.remove_sentence,
                "threshold monotonicity violated");
    }
  }
  if (o.pass) o.detail = "removed 2 of 3 few-shots; 100 monotonicity trials";
  return o;
}

Outcome score_contract() {
  Outcome o;
  const auto model = ScoreModel::load(DEBIAS_DATA_DIR "/score_model.json");
  std::mt19937_64 rng(17);
  std::size_t checks = 0;
  const std::vector<std::pair<std::string, std::vector<std::string>>> orderings = {
      {"ling_form", {"generic", "subset", "individual"}},
      {"connotation", {"negative", "neutral", "positive"}},
      {"situation_evaluation", {"negative", "neutral", "positive"}},
      {"situation", {"enduring", "situational"}},
      {"generalization", {"abstract", "concrete"}},
  };
  for (int trial = 0; trial < 500; ++trial) {
    const auto base = random_record(rng);
    const double s0 = model.unclamped(base);
    std::map<std::string, std::string> current;
    for (const auto& [k, v] : base.features()) current[std::string(k)] = std::string(v);
    for (const auto& [name, values] : indicator_schema()) {
      for (const auto& v : values) {
        auto r = base;
        set_feature(r, name, v);
        const double expected =
            (model.weight(name, v) - model.weight(name, current[name])) / model.span();
        o.require(std::abs((model.unclamped(r) - s0) - expected) < 1e-12,
                  "perturbation of " + name + " is not weight/span");
        ++checks;
      }
    }
    for (const auto& [name, order] : orderings) {
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        auto hi = base, lo = base;
        set_feature(hi, name, order[i]);
        set_feature(lo, name, order[i + 1]);
        o.require(model.score(hi) >= model.score(lo) && model.unclamped(hi) >= model.unclamped(lo),
                  name + ": " + order[i] + " < " + order[i + 1]);
        ++checks;
      }
    }
  }
  if (o.pass) o.detail = std::to_string(checks) + " checks on " + model.version();
  return o;
}

// 5k sentences, 3 male occurrences per female one, some prechecked.
struct CdaCorpus {
  std::vector<Document> docs;
  std::set<std::pair<std::string, std::size_t>> prechecked;
};

CdaCorpus cda_corpus() {
  static const std::vector<std::string> male = {"man",   "boy",  "father",  "brother",
                                                "uncle", "king", "husband", "son"};
  static const std::vector<std::string> female = {"woman", "girl",  "mother", "sister",
                                                  "aunt",  "queen", "wife",   "daughter"};
  static const std::vector<std::string> frames = {
      "The {} walked to the market.", "I met the {} at the station.",
      "Yesterday the {} cooked dinner.", "A {} sat near the window."};
  static const std::vector<std::string> checked = {
      "The president thanked the {} for the speech.", "During the war the {} stayed home.",
      "In 1887 the {} moved to the city."};
  CdaCorpus c;
  std::mt19937_64 rng(23);
  for (int d = 0; d < 1000; ++d) {
    std::string text;
    const std::string id = "c" + std::to_string(d);
    for (std::size_t s = 0; s < 5; ++s) {
      const std::size_t n = d * 5 + s;
      const auto& words = n % 4 == 3 ? female : male;
      const std::string& w = words[rng() % words.size()];
      std::string frame = frames[rng() % frames.size()];
      if (n % 50 == 0) {
        frame = checked[(n / 50) % checked.size()];
        c.prechecked.insert({id, s});
      }
      frame.replace(frame.find("{}"), 2, w);
      text += (s ? " " : "") + frame;
    }
    c.docs.push_back({id, text});
  }
  return c;
}

Outcome gc_targeting() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto corpus = cda_corpus();
  const WordMatcher matcher(gender(), gender_lists());
  auto entities = segment_corpus(corpus.docs, Abbreviations());
  match_all(entities, matcher);
  o.require(entities.size() == 5000, "corpus has " + std::to_string(entities.size()) + " sentences");
  const auto before = count_groups(gender(), entities);
  o.require(before.counts.at("male") == 3 * before.counts.at("female"), "imbalance is not 3:1");

  FixtureOracle oracle;  // first candidate, approves everything here
  const llm::Endpoint ep{&oracle, testing_support::kFixtureModel, 1};
  CdaConfig gc;
  gc.mode = CdaMode::kGc;
  gc.rng_seed = 1;
  auto gc_entities = entities;
  const auto report =
      run_cda(gc_entities, matcher, gender_lists(), gc, PrecheckLists::defaults(), &ep, &ep);
  auto rebuilt = segment_corpus(build_debiased(gc_entities, corpus.docs), Abbreviations());
  match_all(rebuilt, matcher);
  const double dr_after = compute_dr(count_groups(gender(), rebuilt));
  o.require(dr_after <= 0.01, "GC DR after " + fmt("%.4f", dr_after));
  for (const auto& e : gc_entities) {
    if (corpus.prechecked.count({e.doc_id, e.sent_id})) {
      o.require(!e.metadata.text_cda.has_value(), "prechecked sentence modified: " + e.text);
    }
  }

  CdaConfig base;
  base.mode = CdaMode::kBase;
  base.rng_seed = 42;
  auto base_entities = entities;
  const auto base_report =
      run_cda(base_entities, matcher, gender_lists(), base, PrecheckLists::defaults(), nullptr);
  const double rate = base_report.eligible
                          ? double(base_report.substituted) / double(base_report.eligible)
                          : 0.0;
  o.require(std::abs(rate - 0.5) <= 0.03, "BaseCDA rate " + fmt("%.4f", rate));
  const double s = seconds_since(t0);
  o.require(s < 30.0, "took " + fmt("%.2f s", s));
  if (o.pass) {
    o.detail = "GC DR " + fmt("%.4f", report.dr_before) + " -> " + fmt("%.4f", dr_after) +
               ", base rate " + fmt("%.3f", rate) + ", " + fmt("%.2f s", s);
  }
  return o;
}

Outcome plan_arithmetic() {
  Outcome o;
  const auto p = plan_targets(make_counts("gender", {{"female", 235461}, {"male", 592243}}));
  o.require(p.excess == std::map<std::string, std::uint64_t>{{"male", 178391}}, "gender excess");
  o.require(p.deficit == std::map<std::string, std::uint64_t>{{"female", 178391}}, "gender deficit");
  const auto q = plan_targets(make_counts("x", {{"a", 10}, {"b", 1}, {"c", 1}}));
  o.require(q.excess == std::map<std::string, std::uint64_t>{{"a", 6}}, "{10,1,1} excess");
  o.require(q.deficit == std::map<std::string, std::uint64_t>{{"b", 3}, {"c", 3}},
            "{10,1,1} split");
  if (o.pass) o.detail = "gender 178391; {10,1,1} -> 6 = 3 + 3";
  return o;
}

Outcome soct_probe() {
  Outcome o;
  const WordMatcher matcher(gender(), gender_lists());
  auto transcript = llm::Transcript::load(DEBIAS_FIXTURE_DIR "/soct/transcript.jsonl", true);
  llm::TranscriptClient client(transcript, llm::TranscriptMode::kReplay, nullptr);
  SoctConfig cfg;
  cfg.runs_per_template = testing_support::kSoctFixtureRuns;
  const auto completions = run_probe(cfg, llm::Endpoint{&client, testing_support::kFixtureModel, 1});
  const auto r = report(completions, cfg, matcher);
  o.require(completions.size() == 100, "expected 20x5 completions");
  o.require(r.halves.size() == 2, "expected two halves");

  // Brute force: tally classifications per half and evaluate the DR
  // definition in floating point.
  for (std::size_t h = 0; h < 2 && h < r.halves.size(); ++h) {
    std::map<std::string, double> tally = {{"female", 0}, {"male", 0}};
    for (const auto& c : completions) {
      if ((c.template_index < cfg.split()) != (h == 0) || !c.text) continue;
      const auto g = classify(*c.text, matcher);
      if (g != kNeutral) tally[g] += 1;
    }
    const double total = tally["female"] + tally["male"];
    double dr = 0;
    for (const auto& [g, n] : tally) dr += std::abs(n / total - 0.5);
    dr /= 2;
    o.require(std::abs(dr - r.halves[h].dr) < 1e-12,
              r.halves[h].label + " DR " + fmt("%.6f", r.halves[h].dr) + " vs " + fmt("%.6f", dr));
  }

  llm::FunctionClient balanced([](const llm::ChatRequest& req) {
    const auto run = std::stoul(req.purpose.substr(req.purpose.find(":run") + 4));
    return std::string(run % 2 ? "she answered the phone." : "he answered the phone.");
  });
  SoctConfig small;
  small.runs_per_template = 4;
  const auto flat = report(run_probe(small, llm::Endpoint{&balanced, "stub", 2}), small, matcher);
  for (const auto& half : flat.halves) {
    o.require(half.dr == 0.0 && half.direction == "balanced", "balanced stub: " + half.label);
  }
  if (o.pass && r.halves.size() == 2) {
    o.detail = r.halves[0].label + " " + fmt("%.4f", r.halves[0].dr) + ", " + r.halves[1].label +
               " " + fmt("%.4f", r.halves[1].dr) + "; stub balanced";
  }
  return o;
}

Outcome e2e_determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "debias_acceptance_e2e";
  fs::remove_all(root);
  for (const char* run : {"a", "b"}) {
    auto cfg = PipelineConfig::load(DEBIAS_FIXTURE_DIR "/e2e/config.json");
    cfg.output = (root / run).string();
    run_pipeline(cfg);
  }
  std::size_t files = 0;
  for (const auto& f : fs::directory_iterator(root / "a")) {
    const auto other = root / "b" / f.path().filename();
    o.require(fs::exists(other), "missing " + other.string());
    if (f.path().filename() == "manifest.json") {
      auto ma = nlohmann::json::parse(slurp(f.path()));
      auto mb = nlohmann::json::parse(slurp(other));
      ma.erase("timing");
      mb.erase("timing");
      o.require(ma == mb, "manifests differ outside timing");
    } else {
      o.require(slurp(f.path()) == slurp(other), f.path().filename().string() + " differs");
    }
    ++files;
  }
  std::size_t others = 0;
  for ([[maybe_unused]] const auto& f : fs::directory_iterator(root / "b")) ++others;
  o.require(files == others && files > 0, "run directories hold different files");
  fs::remove_all(root);
  if (o.pass) o.detail = std::to_string(files) + " files identical";
  return o;
}

}  // namespace
}  // namespace debias

int main() {
  using namespace debias;
  Log::set_sink([](std::string_view) {});
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"DR formula reproduction", dr_reproduction},
      {"DR properties", dr_properties},
      {"Cumulative-DR convergence", cumulative_convergence},
      {"Round-trip fidelity", round_trip},
      {"Stereotype gate and filter", stereotype_gate},
      {"Score model contract", score_contract},
      {"GC-CDA targeting", gc_targeting},
      {"Plan arithmetic", plan_arithmetic},
      {"SOCT desk-scale", soct_probe},
      {"End-to-end determinism", e2e_determinism},
  };
  const auto t0 = Clock::now();
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed in %.2f s\n", int(criteria.size()) - failed,
              criteria.size(), seconds_since(t0));
  return failed == 0 ? 0 : 1;
}
