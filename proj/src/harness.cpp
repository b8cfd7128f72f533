#include "viia/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>
#include <system_error>
#include <thread>

namespace viia::harness {

void ExperimentConfig::validate() const {
  if (trials_per_subject < 1) throw std::invalid_argument("trials_per_subject must be >= 1");
  if (subjects.empty()) throw std::invalid_argument("at least one subject is required");
  std::set<std::string> ids;
  for (const auto& s : subjects) {
    if (s.id.empty()) throw std::invalid_argument("subject id must be non-empty");
    if (!ids.insert(s.id).second) throw std::invalid_argument("duplicate subject id '" + s.id + "'");
    s.agent.validate(sim.arena.max_forward_speed);
  }
  sim.validate();
}

ExperimentConfig experiment_config_from_json(const io::Json& j) {
  ExperimentConfig c;
  c.sim = io::sim_config_from_json(j, {"subjects", "trials_per_subject", "base_seed"});
  try {
    if (j.contains("trials_per_subject")) c.trials_per_subject = j.at("trials_per_subject").get<int>();
    if (j.contains("base_seed")) c.base_seed = j.at("base_seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (j.contains("subjects")) {
    const auto& subjects = j.at("subjects");
    if (!subjects.is_array()) throw std::invalid_argument("config.subjects: expected an array");
    for (const auto& s : subjects) {
      io::check_keys(s, {"id", "agent"}, "subject");
      if (!s.contains("id") || !s.at("id").is_string()) throw std::invalid_argument("subject.id: expected a string");
      SubjectConfig subject;
      subject.id = s.at("id").get<std::string>();
      if (s.contains("agent")) subject.agent = io::agent_params_from_json(s.at("agent"));
      c.subjects.push_back(std::move(subject));
    }
  } else {
    c.subjects.push_back({"S1", {}});
  }
  c.validate();
  return c;
}

io::Json to_json(const ExperimentConfig& config) {
  io::Json j = io::to_json(config.sim);
  io::Json subjects = io::Json::array();
  for (const auto& s : config.subjects) subjects.push_back({{"id", s.id}, {"agent", io::to_json(s.agent)}});
  j["subjects"] = std::move(subjects);
  j["trials_per_subject"] = config.trials_per_subject;
  j["base_seed"] = config.base_seed;
  return j;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

void fnv1a(std::uint64_t& hash, const unsigned char* data, std::size_t size) {
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= data[i];
    hash *= 0x00000100000001b3ull;
  }
}

void fnv1a_u64(std::uint64_t& hash, std::uint64_t value) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  fnv1a(hash, bytes, 8);
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& subject_id, int trial_index) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  fnv1a_u64(hash, base_seed);
  fnv1a_u64(hash, subject_id.size());
  fnv1a(hash, reinterpret_cast<const unsigned char*>(subject_id.data()), subject_id.size());
  fnv1a_u64(hash, static_cast<std::uint64_t>(trial_index));
  return splitmix64(hash);
}

int draw_placement(std::uint64_t seed, std::optional<int> previous, int segment_count) {
  Rng rng = make_rng(seed, sim::kWorldStream);
  return world::sample_placement(previous, segment_count, rng);
}

TrialRecord run_trial(const sim::SimConfig& config, const SubjectConfig& subject, int trial_index,
                      std::optional<int> previous_placement, std::uint64_t seed, const TrialOptions& options) {
  sim::Simulation simulation(config, subject.agent, seed, previous_placement, options.forced_placement);
  if (options.commands.empty()) {
    simulation.submit({voice::CommandKind::grasp, world::ObjectKind::bottle});
  } else {
    for (const auto& c : options.commands) simulation.submit(c);
  }

  const double dt = config.arena.tick;
  const auto limit = std::llround(config.thresholds.timeout / dt) + 16;
  for (std::int64_t i = 0; i < limit && !simulation.finished(); ++i) {
    const auto frame = simulation.tick();
    if (options.on_frame) options.on_frame(frame);
  }

  TrialRecord record;
  record.subject_id = subject.id;
  record.trial_index = trial_index;
  record.placement_index = simulation.placement();
  record.seed = seed;
  const auto clocks = guidance::trial_clocks(simulation.log(), dt, config.thresholds.timeout);
  record.t1 = clocks.t1;
  record.t2 = clocks.t2;
  record.success = simulation.finished() && simulation.guidance().success;
  if (!record.success) {
    record.fail_reason = simulation.finished() ? simulation.guidance().fail_reason : "timeout";
  }
  return record;
}

TimeStats time_stats(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("time_stats: no values");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, n - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  TimeStats s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(n - 1));
  }
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  return s;
}

std::vector<double> moving_average(const std::vector<double>& values, std::size_t window) {
  std::vector<double> out;
  out.reserve(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= window) sum -= values[i - window];
    out.push_back(sum / static_cast<double>(std::min(i + 1, window)));
  }
  return out;
}

namespace {

SubjectSummary summarize_group(const std::string& id, std::vector<TrialRecord> records, bool with_series) {
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.trial_index < b.trial_index; });
  SubjectSummary s;
  s.subject_id = id;
  s.trials = records.size();
  std::vector<double> t1;
  std::vector<double> t2;
  for (const auto& r : records) {
    t1.push_back(r.t1);
    t2.push_back(r.t2);
    if (r.success) ++s.successes;
  }
  s.success_rate = static_cast<double>(s.successes) / static_cast<double>(s.trials);
  s.t1 = time_stats(t1);
  s.t2 = time_stats(t2);
  if (with_series) {
    s.t1_moving_average = moving_average(t1, kMovingAverageWindow);
    s.t2_moving_average = moving_average(t2, kMovingAverageWindow);
  }
  return s;
}

io::Json stats_json(const TimeStats& s) {
  return {{"mean", s.mean}, {"median", s.median}, {"stddev", s.stddev}, {"min", s.min},
          {"q1", s.q1},     {"q3", s.q3},         {"max", s.max}};
}

io::Json subject_json(const SubjectSummary& s) {
  io::Json j = {{"subject_id", s.subject_id},
                {"trials", s.trials},
                {"successes", s.successes},
                {"success_rate", s.success_rate},
                {"t1", stats_json(s.t1)},
                {"t2", stats_json(s.t2)}};
  if (!s.t1_moving_average.empty()) {
    j["t1_moving_average"] = s.t1_moving_average;
    j["t2_moving_average"] = s.t2_moving_average;
  }
  return j;
}

}  // namespace

SummaryStats summarize(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  SummaryStats stats;
  std::vector<std::string> order;
  for (const auto& r : records) {
    if (std::find(order.begin(), order.end(), r.subject_id) == order.end()) order.push_back(r.subject_id);
  }
  for (const auto& id : order) {
    std::vector<TrialRecord> group;
    std::copy_if(records.begin(), records.end(), std::back_inserter(group),
                 [&](const auto& r) { return r.subject_id == id; });
    stats.subjects.push_back(summarize_group(id, std::move(group), true));
  }
  stats.overall = summarize_group("all", records, false);
  return stats;
}

io::Json to_json(const SummaryStats& stats) {
  io::Json subjects = io::Json::array();
  for (const auto& s : stats.subjects) subjects.push_back(subject_json(s));
  return {{"subjects", std::move(subjects)}, {"overall", subject_json(stats.overall)}};
}

io::Json to_json(const TrialRecord& r) {
  return {{"subject_id", r.subject_id},
          {"trial_index", r.trial_index},
          {"placement_index", r.placement_index},
          {"seed", r.seed},
          {"t1_s", r.t1},
          {"t2_s", r.t2},
          {"success", r.success},
          {"fail_reason", r.fail_reason.empty() ? io::Json(nullptr) : io::Json(r.fail_reason)}};
}

// ---------------------------------------------------------------------------
// CSV

namespace {

constexpr const char* kCsvHeader = "subject_id,trial_index,placement_index,seed,t1_s,t2_s,success,fail_reason";

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw std::invalid_argument("csv line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(std::move(field));
  return fields;
}

template <class T>
T parse_number(const std::string& s, std::size_t line_no, const char* column) {
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("csv line " + std::to_string(line_no) + ": bad " + column + " '" + s + "'");
  }
  return value;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << csv_field(r.subject_id) << ',' << r.trial_index << ',' << r.placement_index << ',' << r.seed << ','
        << shortest(r.t1) << ',' << shortest(r.t2) << ',' << (r.success ? "true" : "false") << ','
        << csv_field(r.fail_reason) << '\n';
  }
}

std::vector<TrialRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::invalid_argument("csv: unexpected header '" + line + "'");
  std::vector<TrialRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line, line_no);
    if (f.size() != 8) throw std::invalid_argument("csv line " + std::to_string(line_no) + ": expected 8 fields");
    TrialRecord r;
    r.subject_id = f[0];
    r.trial_index = parse_number<int>(f[1], line_no, "trial_index");
    r.placement_index = parse_number<int>(f[2], line_no, "placement_index");
    r.seed = parse_number<std::uint64_t>(f[3], line_no, "seed");
    r.t1 = parse_number<double>(f[4], line_no, "t1_s");
    r.t2 = parse_number<double>(f[5], line_no, "t2_s");
    if (f[6] == "true") {
      r.success = true;
    } else if (f[6] == "false") {
      r.success = false;
    } else {
      throw std::invalid_argument("csv line " + std::to_string(line_no) + ": bad success '" + f[6] + "'");
    }
    r.fail_reason = f[7];
    records.push_back(std::move(r));
  }
  return records;
}

// ---------------------------------------------------------------------------

ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentOptions& options) {
  config.validate();

  struct Task {
    const SubjectConfig* subject;
    int trial_index;
    std::optional<int> previous;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& subject : config.subjects) {
    std::optional<int> previous;
    for (int k = 1; k <= config.trials_per_subject; ++k) {
      const auto seed = trial_seed(config.base_seed, subject.id, k);
      tasks.push_back({&subject, k, previous, seed});
      previous = draw_placement(seed, previous, config.sim.arena.segment_count);
    }
  }

  std::vector<std::optional<TrialRecord>> slots(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> interrupted{false};
  auto worker = [&] {
    for (;;) {
      if (options.stop && options.stop->load()) {
        interrupted = true;
        return;
      }
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const auto& t = tasks[i];
      slots[i] = run_trial(config.sim, *t.subject, t.trial_index, t.previous, t.seed);
    }
  };

  const unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExperimentResult result;
  result.interrupted = interrupted.load();
  for (auto& slot : slots) {
    if (!slot) continue;
    if (options.on_record) options.on_record(*slot);
    result.records.push_back(std::move(*slot));
  }
  return result;
}

void write_results(const std::filesystem::path& dir, const std::vector<TrialRecord>& records) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "records.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (dir / "records.csv").string());
    write_csv(csv, records);
  }
  {
    io::Json j = io::Json::array();
    for (const auto& r : records) j.push_back(to_json(r));
    std::ofstream out(dir / "records.json", std::ios::binary);
    out << j.dump(2) << '\n';
  }
  if (!records.empty()) {
    std::ofstream out(dir / "summary.json", std::ios::binary);
    out << to_json(summarize(records)).dump(2) << '\n';
  }
}

}  // namespace viia::harness
