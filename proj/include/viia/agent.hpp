#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "viia/feedback.hpp"
#include "viia/guidance.hpp"
#include "viia/world.hpp"

namespace viia::agent {

// Subject model. Noise terms stand in for the factors that made real
// subjects slower or less accurate: hearing acuity, arm steadiness, layout
// familiarity.
struct AgentParams {
  double azimuth_estimate_sigma = 0.0;  // deg, per-tick error on the heard bearing
  double tremor_sigma = 0.0;            // deg per tick of wrist aim jitter
  double reaction_delay = 0.3;          // s, graspable prompt to close-hand
  double gait_speed = 0.5;              // m/s
  bool holds_arm = false;               // halves tremor
  bool familiar = false;                // knows the arena sector layout

  void validate(double max_forward_speed) const;
  double effective_tremor() const { return holds_arm ? tremor_sigma / 2.0 : tremor_sigma; }
};

// Tuning constants of the scripted policy.
inline constexpr double kDeadband = 10.0;          // deg, beyond it the agent turns in place
inline constexpr double kSettleBand = 5.0;        // deg, a started turn runs until inside this
inline constexpr double kTurnGain = 3.0;           // (deg/s) per deg of heard bearing
inline constexpr double kMaxAgentTurnRate = 60.0;  // deg/s
inline constexpr double kMinSpeedFraction = 0.2;
inline constexpr double kAimStep = 1.0;            // deg
inline constexpr double kReachStep = 0.01;         // m
inline constexpr double kSteerTolerance = 2.0;     // deg
inline constexpr int kDecisionTicks = 5;           // wrist moves at 10 Hz
inline constexpr int kHoldDecisions = 15;          // waits before re-approaching
inline constexpr double kReleaseDelay = 1.0;       // s, close-hand to open-hand
inline constexpr double kFamiliarMargin = 15.0;    // deg beyond the sector edge

enum class Mode { waiting, navigate, align, grasp_pending, release_pending, finished };

struct WristMove {
  int coordinate = 0;  // 0 reach, 1 azimuth, 2 elevation
  int direction = 1;
};

struct AgentState {
  Mode mode = Mode::waiting;
  double heading_estimate = 0.0;  // dead reckoning of own turns
  double sector_half_span = 60.0;
  double aim_azimuth = 0.0;       // believed commanded aim, avatar frame
  bool turning = false;

  int decision_countdown = 0;
  std::optional<double> reference_period;
  std::optional<WristMove> pending;
  WristMove candidate;
  bool informative_seen = false;
  int saturated_decisions = 0;
  std::int64_t timer = 0;
};

AgentState make_agent_state(const world::ArenaConfig& arena, const world::WristPose& initial_wrist);

struct AgentObservation {
  std::optional<feedback::AudioCue> cue;
  std::span<const guidance::Event> events;
};

struct AgentOutput {
  world::StepInput input;
  std::optional<guidance::Intent> intent;
};

// Heard bearing from a cue's per-ear gains, in [-90, 90] deg.
double bearing_from_pan(const feedback::AudioCue& cue);

AgentOutput agent_policy(const AgentObservation& observation, AgentState& state, const AgentParams& params,
                         Rng& rng, double dt, double period_max_ms = feedback::CueParams{}.period_max_ms);

}  // namespace viia::agent
