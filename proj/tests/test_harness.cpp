#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "viia/harness.hpp"

using namespace viia;
using namespace viia::harness;

namespace {

TrialRecord record(std::string subject, int index, double t1, double t2, bool success,
                   std::string reason = {}) {
  return {std::move(subject), index, index % 10, 1000u + static_cast<std::uint64_t>(index), t1, t2, success,
          std::move(reason)};
}

ExperimentConfig small_experiment(int subjects, int trials) {
  ExperimentConfig c;
  for (int i = 0; i < subjects; ++i) c.subjects.push_back({"S" + std::to_string(i + 1), {}});
  c.subjects.back().agent.azimuth_estimate_sigma = 5.0;
  c.trials_per_subject = trials;
  c.base_seed = 7;
  return c;
}

std::string csv_of(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  write_csv(out, records);
  return out.str();
}

}  // namespace

TEST(TrialSeed, DependsOnEveryInput) {
  const auto s = trial_seed(1, "S1", 1);
  EXPECT_EQ(s, trial_seed(1, "S1", 1));
  EXPECT_NE(s, trial_seed(2, "S1", 1));
  EXPECT_NE(s, trial_seed(1, "S2", 1));
  EXPECT_NE(s, trial_seed(1, "S1", 2));
  // Length is mixed in, so concatenations do not collide.
  EXPECT_NE(trial_seed(1, "S1", 11), trial_seed(1, "S11", 1));
}

TEST(DrawPlacement, MatchesSimulation) {
  for (std::uint64_t seed = 1; seed < 50; ++seed) {
    const std::optional<int> prev = seed % 3 == 0 ? std::nullopt : std::optional<int>(static_cast<int>(seed % 10));
    sim::Simulation s({}, {}, seed, prev);
    EXPECT_EQ(draw_placement(seed, prev, 10), s.placement());
  }
}

TEST(TimeStats, MeanOfThree) {
  const auto t = time_stats({10.0, 20.0, 30.0});
  EXPECT_EQ(t.mean, 20.0);
  EXPECT_EQ(t.median, 20.0);
  EXPECT_EQ(t.stddev, 10.0);
  EXPECT_EQ(t.min, 10.0);
  EXPECT_EQ(t.max, 30.0);
  EXPECT_EQ(t.q1, 15.0);
  EXPECT_EQ(t.q3, 25.0);
}

TEST(TimeStats, SingleValueHasZeroSpread) {
  const auto t = time_stats({7.5});
  EXPECT_EQ(t.mean, 7.5);
  EXPECT_EQ(t.stddev, 0.0);
  EXPECT_EQ(t.q1, 7.5);
}

TEST(TimeStats, QuartilesInterpolate) {
  // Linear interpolation at (n - 1) p.
  const auto t = time_stats({4.0, 1.0, 3.0, 2.0});
  EXPECT_DOUBLE_EQ(t.q1, 1.75);
  EXPECT_DOUBLE_EQ(t.median, 2.5);
  EXPECT_DOUBLE_EQ(t.q3, 3.25);
}

TEST(MovingAverage, TrailingWindow) {
  const auto m = moving_average({1, 2, 3, 4, 5, 6}, 3);
  const std::vector<double> expected{1.0, 1.5, 2.0, 3.0, 4.0, 5.0};
  EXPECT_EQ(m, expected);
}

TEST(Summarize, SuccessRateAndSubjects) {
  std::vector<TrialRecord> rs;
  for (int i = 1; i <= 40; ++i) rs.push_back(record("A", i, 10.0, 5.0, i > 4, i > 4 ? "" : "timeout"));
  rs.push_back(record("B", 1, 10.0, 20.0, true));
  rs.push_back(record("B", 2, 30.0, 40.0, true));
  const auto s = summarize(rs);
  ASSERT_EQ(s.subjects.size(), 2u);
  EXPECT_EQ(s.subjects[0].subject_id, "A");
  EXPECT_EQ(s.subjects[0].success_rate, 0.9);
  EXPECT_EQ(s.subjects[1].t1.mean, 20.0);
  EXPECT_EQ(s.overall.trials, 42u);
  EXPECT_EQ(s.overall.successes, 38u);
  EXPECT_EQ(s.subjects[0].t1_moving_average.size(), 40u);
}

TEST(Summarize, AllFailures) {
  const auto s = summarize({record("A", 1, 120, 0, false, "timeout"), record("A", 2, 120, 0, false, "timeout")});
  EXPECT_EQ(s.subjects[0].success_rate, 0.0);
}

TEST(Summarize, EmptyThrows) { EXPECT_THROW(summarize({}), std::invalid_argument); }

TEST(Summarize, JsonShape) {
  const auto j = to_json(summarize({record("A", 1, 10, 5, true)}));
  EXPECT_TRUE(j.contains("subjects"));
  EXPECT_EQ(j.at("subjects").at(0).at("subject_id"), "A");
  EXPECT_TRUE(j.contains("overall"));
}

TEST(Csv, RoundTrip) {
  std::vector<TrialRecord> rs{record("S1", 1, 12.34, 5.5, true), record("odd,\"name\"", 2, 120.0, 0.0, false, "timeout"),
                              record("S3", 3, 0.1 + 0.2, 1e-7, false, "gesture_mismatch")};
  const auto text = csv_of(rs);
  EXPECT_EQ(text.substr(0, text.find('\n')), "subject_id,trial_index,placement_index,seed,t1_s,t2_s,success,fail_reason");
  EXPECT_NE(text.find("\"odd,\"\"name\"\"\""), std::string::npos);
  std::istringstream in(text);
  EXPECT_EQ(read_csv(in), rs);
}

TEST(Csv, RejectsMalformedInput) {
  std::istringstream bad_header("a,b\n");
  EXPECT_THROW(read_csv(bad_header), std::invalid_argument);
  std::istringstream bad_row("subject_id,trial_index,placement_index,seed,t1_s,t2_s,success,fail_reason\nS1,x,0,1,1,1,true,\n");
  EXPECT_THROW(read_csv(bad_row), std::invalid_argument);
}

TEST(RecordJson, NullsForMissing) {
  const auto j = to_json(record("A", 1, 10, 5, true));
  EXPECT_TRUE(j.at("fail_reason").is_null());
  EXPECT_EQ(j.at("t1_s"), 10.0);
}

TEST(RunTrial, SameSeedSameRecord) {
  SubjectConfig subject{"S1", {}};
  subject.agent.azimuth_estimate_sigma = 5.0;
  subject.agent.tremor_sigma = 1.0;
  const auto seed = trial_seed(3, "S1", 1);
  EXPECT_EQ(run_trial({}, subject, 1, std::nullopt, seed), run_trial({}, subject, 1, std::nullopt, seed));
}

TEST(RunTrial, ZeroGaitTimesOut) {
  SubjectConfig subject{"S1", {}};
  subject.agent.gait_speed = 0.0;
  sim::SimConfig config;
  config.thresholds.timeout = 10.0;
  const auto r = run_trial(config, subject, 1, std::nullopt, 5);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.fail_reason, "timeout");
  EXPECT_EQ(r.t1, 10.0);
}

TEST(RunTrial, FrameCallbackSeesEveryTick) {
  int frames = 0;
  TrialOptions options;
  options.on_frame = [&](const sim::Frame& f) { EXPECT_EQ(f.tick, frames++); };
  const auto r = run_trial({}, {"S1", {}}, 1, std::nullopt, 9, options);
  EXPECT_TRUE(r.success);
  EXPECT_GT(frames, 100);
}

TEST(RunExperiment, SixSubjectsFortyTrials) {
  const auto result = run_experiment(small_experiment(6, 40), {4});
  ASSERT_EQ(result.records.size(), 240u);
  EXPECT_FALSE(result.interrupted);
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& r = result.records[i];
    EXPECT_EQ(r.trial_index, static_cast<int>(i % 40) + 1);
    if (r.trial_index > 1) {
      EXPECT_GE(std::abs(r.placement_index - result.records[i - 1].placement_index), 2) << i;
    }
  }
}

TEST(RunExperiment, JobsDoNotChangeOutput) {
  const auto config = small_experiment(2, 10);
  EXPECT_EQ(csv_of(run_experiment(config, {1}).records), csv_of(run_experiment(config, {3}).records));
}

TEST(RunExperiment, StopFlagInterrupts) {
  std::atomic<bool> stop{true};
  ExperimentOptions options;
  options.stop = &stop;
  const auto result = run_experiment(small_experiment(1, 5), options);
  EXPECT_TRUE(result.interrupted);
  EXPECT_LT(result.records.size(), 5u);
}

TEST(ExperimentConfig, ParsesAndValidates) {
  const auto c = experiment_config_from_json(io::Json::parse(
      R"({"trials_per_subject": 3, "base_seed": 9,
          "subjects": [{"id": "A", "agent": {"tremor_sigma": 2.0, "holds_arm": true}}]})"));
  EXPECT_EQ(c.trials_per_subject, 3);
  EXPECT_EQ(c.base_seed, 9u);
  ASSERT_EQ(c.subjects.size(), 1u);
  EXPECT_EQ(c.subjects[0].agent.effective_tremor(), 1.0);
  EXPECT_EQ(experiment_config_from_json(io::Json::object()).subjects.at(0).id, "S1");
}

TEST(ExperimentConfig, RejectsBadInput) {
  auto bad = [](const char* text) { return experiment_config_from_json(io::Json::parse(text)); };
  EXPECT_THROW(bad(R"({"trials_per_subject": 0})"), std::invalid_argument);
  EXPECT_THROW(bad(R"({"subjects": [{"id": "A"}, {"id": "A"}]})"), std::invalid_argument);
  EXPECT_THROW(bad(R"({"subjects": [{"id": ""}]})"), std::invalid_argument);
  EXPECT_THROW(bad(R"({"bogus": 1})"), std::invalid_argument);
  EXPECT_THROW(bad(R"({"subjects": [{"id": "A", "agent": {"gait_speed": 9}}]})"), std::invalid_argument);
}

TEST(WriteResults, ProducesThreeFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "viia_write_results_test";
  std::filesystem::remove_all(dir);
  write_results(dir, {record("A", 1, 10, 5, true)});
  EXPECT_TRUE(std::filesystem::exists(dir / "records.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "records.json"));
  std::ifstream summary(dir / "summary.json");
  EXPECT_EQ(io::Json::parse(summary).at("overall").at("trials"), 1);
  std::filesystem::remove_all(dir);
}
