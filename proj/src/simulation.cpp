#include "viia/simulation.hpp"

#include <cmath>
#include <stdexcept>

namespace viia::sim {

void SimConfig::validate() const {
  arena.validate();
  thresholds.validate();
  global_camera.validate();
  local_camera.validate();
  if (!(control.axis_tolerance > 0.0 && control.wrist_rate_limit > 0.0)) {
    throw std::invalid_argument("control: tolerances must be positive");
  }
  if (!(tremor_correlation >= 0.0 && tremor_correlation < 1.0)) {
    throw std::invalid_argument("tremor_correlation must be in [0, 1)");
  }
  if (!(cue.period_min_ms > 0.0 && cue.period_min_ms < cue.period_max_ms)) {
    throw std::invalid_argument("cue: beep period bounds must satisfy 0 < min < max");
  }
}

std::string_view to_string(DriveMode mode) {
  return mode == DriveMode::agent_driven ? "agent_driven" : "human_driven";
}

Simulation::Simulation(SimConfig config, agent::AgentParams agent, std::uint64_t seed,
                       std::optional<int> previous_placement, std::optional<int> forced_placement)
    : config_(std::move(config)),
      agent_params_(agent),
      seed_(seed),
      sensor_rng_(make_rng(seed, kSensorStream)),
      agent_rng_(make_rng(seed, kAgentStream)),
      previous_placement_(previous_placement) {
  config_.validate();
  agent_params_.validate(config_.arena.max_forward_speed);
  world_ = world::make_world(config_.arena, make_rng(seed, kWorldStream));
  world_.tremor.sigma = agent_params_.effective_tremor();
  world_.tremor.correlation = config_.tremor_correlation;
  begin_trial(forced_placement);
}

void Simulation::begin_trial(std::optional<int> forced_placement) {
  if (forced_placement) {
    world::placement_bearing(*forced_placement, config_.arena);  // range check
    placement_ = *forced_placement;
  } else {
    placement_ = world::sample_placement(previous_placement_, config_.arena.segment_count, world_.rng);
  }
  previous_placement_ = placement_;
  world::reset_trial(world_, placement_, config_.initial_wrist, config_.bottle_axis);

  guidance_ = {};
  prosthesis_ = {};
  prosthesis_.wrist_rotation = world_.wrist.rotation;
  const auto* bottle = world::find_object(world_, world::ObjectKind::bottle);
  prosthesis_.gesture = control::select_gesture(bottle->kind, bottle->principal_axis, config_.control).gesture;
  agent_ = agent::make_agent_state(config_.arena, config_.initial_wrist);
  agent_intent_.reset();
  log_.clear();
  last_target_distance_.reset();
  ++trials_started_;
}

void Simulation::submit(const voice::Command& command) { commands_.push_back(command); }

std::optional<guidance::Intent> Simulation::take_intent(std::vector<guidance::Event>& events) {
  while (!commands_.empty()) {
    const voice::Command command = commands_.front();
    const voice::SessionView view{guidance_.phase, last_target_distance_, world_.tick_index};
    auto routed = voice::dispatch(command, view);
    if (!routed.intent) {
      commands_.pop_front();
      events.insert(events.end(), routed.events.begin(), routed.events.end());
      continue;
    }
    commands_.pop_front();
    if (*routed.intent == guidance::Intent::start_task && finished()) begin_trial(std::nullopt);
    return routed.intent;
  }
  return std::nullopt;
}

Frame Simulation::tick() {
  using guidance::Phase;
  const double dt = config_.arena.tick;
  std::vector<guidance::Event> events;

  auto intent = take_intent(events);
  if (!intent && agent_intent_) {
    intent = agent_intent_;
    agent_intent_.reset();
  }

  const auto global = perception::global_detect(world_, config_.global_camera, sensor_rng_);
  const auto local = perception::local_detect(world_, config_.local_camera, sensor_rng_);
  for (const auto& d : global) {
    if (d.category == world::ObjectKind::bottle) last_target_distance_ = d.distance;
  }

  const Phase before = guidance_.phase;
  auto transition = guidance::guidance_step(
      guidance_, {world_, global, local, intent, prosthesis_, config_.control}, config_.thresholds);
  guidance_ = std::move(transition.next);
  events.insert(events.end(), transition.events.begin(), transition.events.end());

  if (transition.grasp) {
    prosthesis_.holding = transition.grasp->success;
    prosthesis_.aperture = transition.grasp->success ? 0.4 : 0.0;
    if (transition.grasp->success) {
      for (std::size_t i = 0; i < world_.objects.size(); ++i) {
        if (world_.objects[i].kind == world::ObjectKind::bottle) world_.attached_object = i;
      }
    }
  }
  if (guidance_.phase == Phase::done && before != Phase::done) {
    prosthesis_.aperture = 1.0;
    prosthesis_.holding = false;
    world_.attached_object.reset();
  }

  const bool aligning = guidance_.phase == Phase::aligning || guidance_.phase == Phase::graspable;
  const double error = guidance::alignment_error(local, config_.thresholds);
  const auto cue = feedback::cue_for_phase(guidance_.phase, world_, error, config_.cue);

  world::StepInput input;
  if (mode_ == DriveMode::agent_driven) {
    auto out = agent::agent_policy({cue, events}, agent_, agent_params_, agent_rng_, dt, config_.cue.period_max_ms);
    input = out.input;
    if (out.intent) agent_intent_ = out.intent;
  } else {
    input = human_input_;
  }
  if (aligning && local) input.wrist.rotation += control::wrist_setpoint(*local, dt, config_.control);

  Frame frame;
  frame.tick = world_.tick_index;
  world::step_avatar(world_, input, dt);
  prosthesis_.wrist_rotation = world_.wrist.rotation;

  frame.phase = guidance_.phase;
  frame.avatar = world_.avatar;
  frame.wrist = world_.wrist;
  frame.wrist.aim_azimuth = normalize_degrees(frame.wrist.aim_azimuth + world_.tremor.azimuth_offset);
  frame.wrist.aim_elevation += world_.tremor.elevation_offset;
  frame.audio_cue = cue;
  for (const auto& e : events) {
    if (e.kind == guidance::EventKind::prompt && !frame.prompt) {
      frame.prompt = e.text;
    } else {
      frame.events.push_back(e);
    }
  }
  frame.prosthesis = prosthesis_;
  frame.clocks = guidance::running_clocks(guidance_, frame.tick, dt);
  if (aligning && std::isfinite(error)) frame.alignment_error = error;
  frame.objects = world_.objects;
  frame.placement_index = placement_;

  log_.insert(log_.end(), events.begin(), events.end());
  return frame;
}

}  // namespace viia::sim
