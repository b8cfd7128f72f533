#include "viia/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace viia::agent {

void AgentParams::validate(double max_forward_speed) const {
  if (!(azimuth_estimate_sigma >= 0.0 && tremor_sigma >= 0.0)) {
    throw std::invalid_argument("agent: noise sigmas must be >= 0");
  }
  if (!(reaction_delay >= 0.0)) throw std::invalid_argument("agent: reaction_delay must be >= 0");
  if (!(gait_speed >= 0.0 && gait_speed <= max_forward_speed)) {
    throw std::invalid_argument("agent: gait_speed must be in [0, max_forward_speed]");
  }
}

AgentState make_agent_state(const world::ArenaConfig& arena, const world::WristPose& initial_wrist) {
  AgentState state;
  state.sector_half_span = arena.span / 2.0;
  state.aim_azimuth = initial_wrist.aim_azimuth;
  return state;
}

double bearing_from_pan(const feedback::AudioCue& cue) {
  const double left = cue.left_gain * cue.left_gain;
  const double right = cue.right_gain * cue.right_gain;
  const double power = left + right;
  if (power <= 0.0) return 0.0;
  const double pan = std::clamp((right - left) / power, -1.0, 1.0);
  return rad_to_deg(std::asin(pan));
}

namespace {

std::int64_t ticks_for(double seconds, double dt) { return std::llround(seconds / dt); }

double heard_bearing(const feedback::AudioCue& cue, const AgentParams& params, Rng& rng) {
  double bearing = bearing_from_pan(cue);
  if (params.azimuth_estimate_sigma > 0.0) {
    bearing += std::normal_distribution<double>(0.0, params.azimuth_estimate_sigma)(rng);
  }
  return bearing;
}

void react_to_prompts(const AgentObservation& obs, AgentState& state, const AgentParams& params, double dt) {
  for (const auto& event : obs.events) {
    if (event.kind != guidance::EventKind::prompt) continue;
    if (event.text == guidance::prompts::kDetecting) {
      state.mode = Mode::navigate;
    } else if (event.text == guidance::prompts::kAccessible) {
      state.mode = Mode::align;
      state.decision_countdown = 0;
    } else if (event.text == guidance::prompts::kGraspable) {
      state.mode = Mode::grasp_pending;
      state.timer = ticks_for(params.reaction_delay, dt);
    } else if (event.text == guidance::prompts::kSuccess || event.text == guidance::prompts::kFailure) {
      state.mode = Mode::finished;
    }
  }
}

world::StepInput navigate(const std::optional<feedback::AudioCue>& cue, AgentState& state,
                          const AgentParams& params, Rng& rng, double dt) {
  world::StepInput input;
  if (!cue) return input;
  double bearing = heard_bearing(*cue, params, rng);
  if (params.familiar) {
    const double edge = state.sector_half_span + kFamiliarMargin;
    bearing = std::clamp(state.heading_estimate + bearing, -edge, edge) - state.heading_estimate;
  }
  // Turning starts outside the deadband and, once started, runs until the
  // bearing settles well inside it.
  if (std::abs(bearing) > kDeadband) state.turning = true;
  if (std::abs(bearing) < kSettleBand) state.turning = false;
  if (state.turning) {
    input.turn_rate = std::copysign(std::min(kMaxAgentTurnRate, kTurnGain * std::abs(bearing)), bearing);
    state.heading_estimate = normalize_degrees(state.heading_estimate + input.turn_rate * dt);
  } else {
    input.forward_speed = params.gait_speed * std::max(kMinSpeedFraction, 1.0 - cue->attenuation);
  }
  return input;
}

world::WristDelta move_delta(const WristMove& move, double aim_azimuth, double sign = 1.0) {
  world::WristDelta delta;
  const double d = sign * move.direction;
  switch (move.coordinate) {
    case 0: {
      const double a = deg_to_rad(aim_azimuth);
      delta.offset = {d * kReachStep * std::cos(a), d * kReachStep * std::sin(a), 0.0};
      break;
    }
    case 1: delta.aim_azimuth = d * kAimStep; break;
    default: delta.aim_elevation = d * kAimStep; break;
  }
  return delta;
}

WristMove next_candidate(WristMove move) {
  if (move.direction > 0) return {move.coordinate, -1};
  return {(move.coordinate + 1) % 3, 1};
}

world::StepInput align(const std::optional<feedback::AudioCue>& cue, AgentState& state, const AgentParams& params,
                       Rng& rng, double period_max) {
  world::StepInput input;
  if (state.decision_countdown > 0) {
    --state.decision_countdown;
    return input;
  }
  state.decision_countdown = kDecisionTicks - 1;

  const double period = cue && cue->beep_period_ms ? *cue->beep_period_ms : period_max;
  const bool saturated = period >= period_max - 1e-9;

  auto apply = [&](const WristMove& move, double sign) {
    input.wrist = move_delta(move, state.aim_azimuth, sign);
    state.aim_azimuth += input.wrist.aim_azimuth;
  };

  if (state.pending) {
    if (!saturated && state.reference_period && period < *state.reference_period) {
      state.reference_period = period;
      apply(*state.pending, 1.0);
      return input;
    }
    apply(*state.pending, -1.0);
    state.candidate = next_candidate(*state.pending);
    state.pending.reset();
    return input;
  }

  if (saturated) {
    ++state.saturated_decisions;
    state.reference_period.reset();
    if (state.informative_seen && state.saturated_decisions <= kHoldDecisions) return input;
    if (!cue) return input;
    const double bearing = heard_bearing(*cue, params, rng);
    if (std::abs(bearing) > kSteerTolerance) {
      input.wrist.aim_azimuth = std::copysign(kAimStep, bearing);
      state.aim_azimuth += input.wrist.aim_azimuth;
    } else {
      apply({0, 1}, 1.0);
    }
    return input;
  }

  state.informative_seen = true;
  state.saturated_decisions = 0;
  state.reference_period = period;
  state.pending = state.candidate;
  apply(state.candidate, 1.0);
  return input;
}

}  // namespace

AgentOutput agent_policy(const AgentObservation& observation, AgentState& state, const AgentParams& params,
                         Rng& rng, double dt, double period_max_ms) {
  react_to_prompts(observation, state, params, dt);
  AgentOutput out;
  switch (state.mode) {
    case Mode::navigate:
      out.input = navigate(observation.cue, state, params, rng, dt);
      break;
    case Mode::align:
      out.input = align(observation.cue, state, params, rng, period_max_ms);
      break;
    case Mode::grasp_pending:
      if (--state.timer <= 0) {
        out.intent = guidance::Intent::close_hand;
        state.mode = Mode::release_pending;
        state.timer = ticks_for(kReleaseDelay, dt);
      }
      break;
    case Mode::release_pending:
      if (--state.timer <= 0) {
        out.intent = guidance::Intent::open_hand;
        state.mode = Mode::finished;
      }
      break;
    case Mode::waiting:
    case Mode::finished:
      break;
  }
  return out;
}

}  // namespace viia::agent
