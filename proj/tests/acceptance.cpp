// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <chrono>
#include <cstdio>
#include <sstream>
#include <thread>

#include "guidance_table.hpp"
#include "oracles.hpp"
#include "viia/harness.hpp"
#include "viia/service.hpp"

using namespace viia;

namespace {

// Tolerances and sizes.
constexpr double kProtocolBudgetS = 10.0;
constexpr int kChainLength = 10000;
constexpr double kMinPValue = 0.01;
constexpr double kItdTolUs = 1.0;
constexpr double kItdNominalUs = 656.0;
constexpr double kItdNominalTolUs = 0.5;
constexpr int kGraspCases = 1000;
constexpr double kGraspTol = 1e-9;
constexpr int kNoiseTrials = 200;
constexpr double kNoiseLevels[] = {0.0, 5.0, 15.0};
constexpr double kTremor = 2.0;
constexpr int kFuzzTrials = 1000;

// Written out here rather than taken from the library headers.
const std::vector<std::string> kPrompts = {
    "real-time detection in progress",
    "reached the accessible range",
    "reached the graspable range",
    "This grasp task is over, grasp is successful",
};

int failures = 0;

void report(bool pass, const char* name, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

unsigned jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

void protocol_fidelity() {
  const auto start = std::chrono::steady_clock::now();
  int ok = 0;
  int exact = 0;
  for (int placement = 0; placement < 10; ++placement) {
    std::vector<std::string> prompts;
    harness::TrialOptions options;
    options.forced_placement = placement;
    options.on_frame = [&](const sim::Frame& f) {
      if (f.prompt) prompts.push_back(*f.prompt);
      for (const auto& e : f.events) {
        if (e.kind == guidance::EventKind::prompt) prompts.push_back(e.text);
      }
    };
    const auto r = harness::run_trial({}, {"P", {}}, 1, std::nullopt, harness::trial_seed(1, "P", placement + 1),
                                      options);
    ok += r.success;
    exact += prompts == kPrompts;
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(ok == 10 && exact == 10 && elapsed < kProtocolBudgetS, "protocol_fidelity",
         fmt("%d/10 succeeded, %d/10 exact prompt sequences, %.2f s (budget %.0f s)", ok, exact, elapsed,
             kProtocolBudgetS));
}

void placement_constraint() {
  std::vector<int> chain;
  std::optional<int> previous;
  for (int k = 1; k <= kChainLength; ++k) {
    const int p = harness::draw_placement(harness::trial_seed(1, "chain", k), previous, 10);
    chain.push_back(p);
    previous = p;
  }
  int violations = 0;
  for (std::size_t k = 1; k < chain.size(); ++k) violations += std::abs(chain[k] - chain[k - 1]) < 2;
  const auto chi = oracle::placement_uniformity(chain, 10);
  report(violations == 0 && chi.p_value > kMinPValue, "placement_constraint",
         fmt("%d violations in %d draws, chi2 = %.2f on %.0f dof, p = %.4f (> %.2f)", violations, kChainLength,
             chi.statistic, chi.dof, chi.p_value, kMinPValue));
}

void audio_cues() {
  const double itd0 = feedback::woodworth_itd_us(0.0);
  const double itd90 = feedback::woodworth_itd_us(90.0);
  bool sign_ok = true;
  for (double a = -179.0; a <= 179.0; a += 1.0) {
    if (a != 0.0 && std::signbit(feedback::woodworth_itd_us(a)) != std::signbit(a)) sign_ok = false;
  }
  const bool halves = feedback::attenuation(4.0) == feedback::attenuation(2.0) / 2.0;
  const bool endpoints = feedback::proximity_cue(0.0) == 80.0 && feedback::proximity_cue(1.0) == 1000.0;
  const bool pass = itd0 == 0.0 && std::abs(itd90 - oracle::kItd90Us) <= kItdTolUs &&
                    std::abs(itd90 - kItdNominalUs) <= kItdNominalTolUs && sign_ok && halves && endpoints;
  report(pass, "audio_cues",
         fmt("itd(0) = %g, itd(90) = %.4f us (oracle %.4f), sign %s, attenuation 2->4 m %s, period %g/%g ms", itd0,
             itd90, oracle::kItd90Us, sign_ok ? "ok" : "bad", halves ? "halves" : "does not halve",
             feedback::proximity_cue(0.0), feedback::proximity_cue(1.0)));
}

void grasp_oracle() {
  std::mt19937_64 rng(2024);
  int mismatches = 0;
  double worst = 0.0;
  for (int k = 0; k < kGraspCases; ++k) {
    const auto c = oracle::random_grasp_case(rng);
    control::ProsthesisState p;
    p.gesture = c.gesture;
    const auto o = control::attempt_grasp(c.state, p, {});
    const auto t = oracle::grasp_truth(c.state, c.gesture);
    const double err = std::max({std::abs(o.distance - t.distance), std::abs(o.aim_error - t.aim_error),
                                 std::abs(std::abs(o.axis_angle) - t.axis_line_angle)});
    worst = std::max(worst, err);
    mismatches += err > kGraspTol || o.reason != t.reason || o.success != (t.reason == control::GraspReason::ok);
  }
  report(mismatches == 0, "grasp_oracle",
         fmt("%d/%d mismatches, worst numeric deviation %.3g (tol %.0e)", mismatches, kGraspCases, worst, kGraspTol));
}

std::vector<harness::TrialRecord> batch(const std::string& id, agent::AgentParams params) {
  harness::ExperimentConfig c;
  c.subjects = {{id, params}};
  c.trials_per_subject = kNoiseTrials;
  c.base_seed = 77;
  return harness::run_experiment(c, {jobs()}).records;
}

void noise_monotonicity() {
  std::vector<double> means;
  std::string detail = "mean t1";
  for (double sigma : kNoiseLevels) {
    agent::AgentParams p;
    p.azimuth_estimate_sigma = sigma;
    const auto records = batch("N" + std::to_string(static_cast<int>(sigma)), p);
    double sum = 0.0;
    for (const auto& r : records) sum += r.t1;
    means.push_back(sum / static_cast<double>(records.size()));
    detail += fmt(" %g deg: %.3f s;", sigma, means.back());
  }
  const bool monotone = std::is_sorted(means.begin(), means.end());

  auto rate = [](const std::vector<harness::TrialRecord>& rs) {
    double ok = 0.0;
    for (const auto& r : rs) ok += r.success;
    return ok / static_cast<double>(rs.size());
  };
  agent::AgentParams free_arm;
  free_arm.tremor_sigma = kTremor;
  agent::AgentParams held = free_arm;
  held.holds_arm = true;
  const double r_free = rate(batch("T", free_arm));
  const double r_held = rate(batch("T", held));
  detail += fmt(" success at tremor %g: held %.3f, free %.3f", kTremor, r_held, r_free);
  report(monotone && r_held >= r_free, "noise_monotonicity", detail);
}

void determinism() {
  harness::ExperimentConfig c;
  c.subjects = {{"A", {}}, {"B", {}}};
  c.subjects[1].agent.azimuth_estimate_sigma = 5.0;
  c.subjects[1].agent.tremor_sigma = 1.0;
  c.trials_per_subject = 20;
  c.base_seed = 5;
  auto csv = [&](unsigned j) {
    std::ostringstream out;
    harness::write_csv(out, harness::run_experiment(c, {j}).records);
    return out.str();
  };
  const bool csv_same = csv(1) == csv(jobs());

  service::SessionConfig sc;
  sc.seed = 99;
  sc.agent = c.subjects[1].agent;
  service::Session session("s1", sc);
  session.handle_client_message({{"type", "command"}, {"text", "grasp bottle"}});
  std::vector<std::string> live;
  while (session.wants_tick()) live.push_back(session.tick_frame().dump());
  std::vector<std::string> headless;
  harness::TrialOptions options;
  options.on_frame = [&](const sim::Frame& f) { headless.push_back(io::to_json(f).dump()); };
  harness::run_trial(sc.sim, {sc.subject_id, sc.agent}, 1, std::nullopt, sc.seed, options);
  const bool replay_same = live == headless;
  report(csv_same && replay_same, "determinism",
         fmt("CSV %s across runs; session replay %s headless trace (%zu frames)",
             csv_same ? "byte-identical" : "differs", replay_same ? "equals" : "differs from", live.size()));
}

void state_machine() {
  using guidance::Phase;
  const auto declared = table::declared();
  int table_errors = 0;
  std::set<std::pair<Phase, Phase>> seen;
  for (const auto& c : table::all_cases()) {
    for (bool grasp_ok : {false, true}) {
      const auto t = table::run(c, grasp_ok);
      const auto e = table::expected(c, grasp_ok);
      if (t.next.phase != e.next) ++table_errors;
      if (t.next.phase != c.phase) {
        if (!declared.count({c.phase, t.next.phase})) ++table_errors;
        seen.insert({c.phase, t.next.phase});
      }
    }
  }
  const auto good = table::reaches_done(seen);
  const bool all_reach_done = good.size() == std::size(table::kPhases);

  // Fuzzed trials: random subject noise plus random commands at random ticks.
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const voice::CommandKind kinds[] = {voice::CommandKind::stop, voice::CommandKind::status,
                                      voice::CommandKind::close_hand, voice::CommandKind::open_hand,
                                      voice::CommandKind::grasp};
  int undeclared = 0;
  int repeats = 0;
  int disorder = 0;
  for (int k = 0; k < kFuzzTrials; ++k) {
    agent::AgentParams p;
    p.azimuth_estimate_sigma = 15.0 * unit(rng);
    p.tremor_sigma = 3.0 * unit(rng);
    p.holds_arm = unit(rng) < 0.5;
    p.familiar = unit(rng) < 0.5;
    p.reaction_delay = unit(rng);
    p.gait_speed = 0.1 + 0.9 * unit(rng);
    sim::SimConfig config;
    config.thresholds.timeout = 30.0;
    sim::Simulation s(config, p, rng(), std::nullopt);
    s.submit({voice::CommandKind::grasp, world::ObjectKind::bottle});
    const double command_rate = 0.02 * unit(rng);
    Phase previous = Phase::idle;
    std::vector<std::string> prompts;
    for (int tick = 0; tick < 1600 && !s.finished(); ++tick) {
      if (tick > 0 && unit(rng) < command_rate) {
        const auto kind = kinds[rng() % std::size(kinds)];
        if (kind == voice::CommandKind::grasp) {
          s.submit({kind, world::ObjectKind::bottle});
        } else {
          s.submit({kind, std::nullopt});
        }
      }
      const auto f = s.tick();
      if (f.phase != previous && !declared.count({previous, f.phase})) ++undeclared;
      previous = f.phase;
      if (f.prompt) prompts.push_back(*f.prompt);
      for (const auto& e : f.events) {
        if (e.kind == guidance::EventKind::prompt) prompts.push_back(e.text);
      }
    }
    std::set<std::string> unique(prompts.begin(), prompts.end());
    repeats += unique.size() != prompts.size();
    std::size_t rank = 0;
    for (const auto& text : prompts) {
      const auto it = std::find(kPrompts.begin(), kPrompts.end(), text);
      const std::size_t r = it == kPrompts.end() ? 3 : static_cast<std::size_t>(it - kPrompts.begin());
      if (r < rank) ++disorder;
      rank = r;
    }
  }
  report(table_errors == 0 && seen == declared && all_reach_done && undeclared == 0 && repeats == 0 && disorder == 0,
         "state_machine",
         fmt("table: %d errors, %zu/%zu edges exercised, done reachable from %zu/%zu phases; fuzz over %d trials: "
             "%d undeclared edges, %d trials with repeated prompts, %d out-of-order prompts",
             table_errors, seen.size(), declared.size(), good.size(), std::size(table::kPhases), kFuzzTrials,
             undeclared, repeats, disorder));
}

}  // namespace

int main() {
  protocol_fidelity();
  placement_constraint();
  audio_cues();
  grasp_oracle();
  noise_monotonicity();
  determinism();
  state_machine();
  return failures == 0 ? 0 : 1;
}
