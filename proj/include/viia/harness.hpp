#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "viia/agent.hpp"
#include "viia/serialization.hpp"
#include "viia/simulation.hpp"

namespace viia::harness {

struct SubjectConfig {
  std::string id;
  agent::AgentParams agent;
};

struct ExperimentConfig {
  std::vector<SubjectConfig> subjects;
  int trials_per_subject = 40;
  std::uint64_t base_seed = 1;
  sim::SimConfig sim;

  void validate() const;
};

// Mirrors ExperimentConfig: the simulation keys plus "subjects",
// "trials_per_subject" and "base_seed".
ExperimentConfig experiment_config_from_json(const io::Json& j);
io::Json to_json(const ExperimentConfig& config);

struct TrialRecord {
  std::string subject_id;
  int trial_index = 1;
  int placement_index = 0;
  std::uint64_t seed = 0;
  double t1 = 0.0;
  double t2 = 0.0;
  bool success = false;
  std::string fail_reason;  // empty on success

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

// Replayable per-trial seed derived from (base_seed, subject_id, trial_index).
std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& subject_id, int trial_index);

// Placement the simulation will draw for this seed; lets placement chains be
// computed before trials run.
int draw_placement(std::uint64_t seed, std::optional<int> previous, int segment_count);

struct TrialOptions {
  std::optional<int> forced_placement;
  // Submitted before the first tick; empty means a single Grasp(bottle).
  std::vector<voice::Command> commands;
  std::function<void(const sim::Frame&)> on_frame;
};

TrialRecord run_trial(const sim::SimConfig& config, const SubjectConfig& subject, int trial_index,
                      std::optional<int> previous_placement, std::uint64_t seed, const TrialOptions& options = {});

struct TimeStats {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for one value
  double min = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

struct SubjectSummary {
  std::string subject_id;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  TimeStats t1;
  TimeStats t2;
  std::vector<double> t1_moving_average;  // trailing window over trial index
  std::vector<double> t2_moving_average;
};

struct SummaryStats {
  std::vector<SubjectSummary> subjects;
  SubjectSummary overall;
};

inline constexpr std::size_t kMovingAverageWindow = 5;

TimeStats time_stats(std::vector<double> values);
std::vector<double> moving_average(const std::vector<double>& values, std::size_t window);
// Throws std::invalid_argument on an empty record list.
SummaryStats summarize(const std::vector<TrialRecord>& records);
io::Json to_json(const SummaryStats& stats);

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_csv(std::istream& in);
io::Json to_json(const TrialRecord& record);

struct ExperimentOptions {
  unsigned jobs = 1;
  const std::atomic<bool>* stop = nullptr;  // checked between trials
  std::function<void(const TrialRecord&)> on_record;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;  // ordered by (subject, trial_index)
  bool interrupted = false;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentOptions& options = {});

// Writes records.csv, records.json and summary.json into `dir`.
void write_results(const std::filesystem::path& dir, const std::vector<TrialRecord>& records);

}  // namespace viia::harness
