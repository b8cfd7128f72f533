#include "viia/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace viia {

void Thresholds::validate() const {
  if (!(accessible_distance > 0.0 && graspable_aim > 0.0 && graspable_band_min > 0.0 &&
        graspable_band_max > 0.0 && dwell > 0.0 && timeout > 0.0)) {
    throw std::invalid_argument("thresholds: all values must be positive");
  }
  if (!(graspable_band_min < graspable_band_max)) {
    throw std::invalid_argument("thresholds: graspable band min must be below max");
  }
}

}  // namespace viia

namespace viia::guidance {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::idle: return "idle";
    case Phase::detecting: return "detecting";
    case Phase::navigating: return "navigating";
    case Phase::aligning: return "aligning";
    case Phase::graspable: return "graspable";
    case Phase::grasping: return "grasping";
    case Phase::done: return "done";
  }
  return "unknown";
}

std::string_view to_string(Intent intent) {
  switch (intent) {
    case Intent::start_task: return "start_task";
    case Intent::abort: return "abort";
    case Intent::close_hand: return "close_hand";
    case Intent::open_hand: return "open_hand";
  }
  return "unknown";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::prompt: return "prompt";
    case EventKind::warning: return "warning";
    case EventKind::status: return "status";
  }
  return "unknown";
}

double alignment_error(const std::optional<perception::LocalDetection>& local, const Thresholds& thresholds) {
  if (!local) return std::numeric_limits<double>::infinity();
  const double aim = local->aim_error / thresholds.graspable_aim;
  const double reach = std::abs(local->distance - thresholds.band_center()) / thresholds.band_half_width();
  return std::max(aim, reach);
}

bool graspable_now(const std::optional<perception::LocalDetection>& local, const Thresholds& thresholds) {
  return local && local->aim_error <= thresholds.graspable_aim && thresholds.in_band(local->distance);
}

std::vector<std::pair<Phase, Phase>> declared_edges() {
  return {
      {Phase::idle, Phase::detecting},      {Phase::detecting, Phase::navigating},
      {Phase::navigating, Phase::aligning}, {Phase::aligning, Phase::graspable},
      {Phase::graspable, Phase::grasping},  {Phase::grasping, Phase::done},
      {Phase::detecting, Phase::done},      {Phase::navigating, Phase::done},
      {Phase::aligning, Phase::done},       {Phase::graspable, Phase::done},
  };
}

namespace {

class Stepper {
 public:
  Stepper(const GuidanceState& state, std::int64_t tick) : t_{state, {}, std::nullopt}, tick_(tick) {}

  void enter(Phase phase) {
    t_.next.phase = phase;
    t_.next.entered |= 1u << static_cast<int>(phase);
  }
  void emit(EventKind kind, std::string_view text) { t_.events.push_back({kind, std::string(text), tick_}); }
  void finish(bool success, std::string reason) {
    enter(Phase::done);
    t_.next.success = success;
    t_.next.fail_reason = success ? std::string() : std::move(reason);
    emit(EventKind::prompt, success ? prompts::kSuccess : prompts::kFailure);
  }
  GuidanceState& next() { return t_.next; }
  Transition& result() { return t_; }

 private:
  Transition t_;
  std::int64_t tick_;
};

bool active(Phase p) { return p != Phase::idle && p != Phase::done; }

// Returns true when the intent consumed the tick's transition.
bool apply_intent(Stepper& s, Intent intent, const GuidanceInput& input, const Thresholds& thresholds,
                  std::int64_t tick) {
  const Phase phase = s.next().phase;
  switch (intent) {
    case Intent::start_task:
      if (phase == Phase::idle) {
        s.enter(Phase::detecting);
        s.next().detection_tick = tick;
        s.emit(EventKind::prompt, prompts::kDetecting);
        return true;
      }
      s.emit(EventKind::warning, phase == Phase::done ? warnings::kTaskOver : warnings::kTaskInProgress);
      return false;
    case Intent::abort:
      if (active(phase)) {
        s.finish(false, input.prosthesis.holding ? std::string(control::to_string(control::GraspReason::dropped))
                                                 : std::string("aborted"));
        return true;
      }
      s.emit(EventKind::warning, phase == Phase::done ? warnings::kTaskOver : warnings::kNoTask);
      return false;
    case Intent::close_hand:
      if (phase == Phase::graspable) {
        const auto outcome = control::attempt_grasp(input.world, input.prosthesis, thresholds, input.control);
        s.enter(Phase::grasping);
        s.next().outcome = outcome;
        s.result().grasp = outcome;
        return true;
      }
      s.emit(EventKind::warning, warnings::kCannotClose);
      return false;
    case Intent::open_hand:
      if (phase == Phase::grasping) {
        const auto& outcome = s.next().outcome;
        const bool ok = outcome && outcome->success;
        s.finish(ok, outcome ? std::string(control::to_string(outcome->reason)) : std::string("aborted"));
        return true;
      }
      s.emit(EventKind::warning, warnings::kNothingToRelease);
      return false;
  }
  return false;
}

}  // namespace

Transition guidance_step(const GuidanceState& state, const GuidanceInput& input, const Thresholds& thresholds) {
  const std::int64_t tick = input.world.tick_index;
  const double dt = input.world.arena.tick;
  Stepper s(state, tick);

  if (active(state.phase) && state.detection_tick) {
    const auto limit = static_cast<std::int64_t>(std::llround(thresholds.timeout / dt));
    if (tick - *state.detection_tick >= limit) {
      s.finish(false, "timeout");
      return std::move(s.result());
    }
  }

  if (input.intent && apply_intent(s, *input.intent, input, thresholds, tick)) {
    return std::move(s.result());
  }

  switch (state.phase) {
    case Phase::detecting: {
      const bool seen = std::any_of(input.global.begin(), input.global.end(), [](const auto& d) {
        return d.category == world::ObjectKind::bottle;
      });
      if (seen) s.enter(Phase::navigating);
      break;
    }
    case Phase::navigating: {
      const auto* target = world::find_object(input.world, world::ObjectKind::bottle);
      if (target != nullptr &&
          world::relative_polar(input.world.avatar, target->position).distance <= thresholds.accessible_distance) {
        s.enter(Phase::aligning);
        s.next().accessible_tick = tick;
        s.next().dwell_count = 0;
        s.emit(EventKind::prompt, prompts::kAccessible);
      }
      break;
    }
    case Phase::aligning: {
      const auto needed = std::max<std::int64_t>(1, std::llround(thresholds.dwell / dt));
      s.next().dwell_count = graspable_now(input.local, thresholds) ? state.dwell_count + 1 : 0;
      if (s.next().dwell_count >= needed) {
        s.enter(Phase::graspable);
        s.next().graspable_tick = tick;
        s.emit(EventKind::prompt, prompts::kGraspable);
      }
      break;
    }
    default:
      break;
  }
  return std::move(s.result());
}

namespace {

// Dividing by the integral tick rate keeps whole-tick times exact in decimal.
double seconds(std::int64_t ticks, double dt) { return static_cast<double>(ticks) / (1.0 / dt); }

}  // namespace

TrialClocks trial_clocks(std::span<const Event> events, double dt, double timeout) {
  auto find = [&](std::string_view text) -> std::optional<std::int64_t> {
    for (const auto& e : events) {
      if (e.kind == EventKind::prompt && e.text == text) return e.tick;
    }
    return std::nullopt;
  };
  const auto detecting = find(prompts::kDetecting);
  const auto accessible = find(prompts::kAccessible);
  const auto graspable = find(prompts::kGraspable);

  TrialClocks clocks{timeout, timeout};
  if (detecting && accessible) clocks.t1 = std::min(timeout, seconds(*accessible - *detecting, dt));
  if (accessible && graspable) clocks.t2 = std::min(timeout, seconds(*graspable - *accessible, dt));
  return clocks;
}

RunningClocks running_clocks(const GuidanceState& state, std::int64_t tick, double dt) {
  RunningClocks clocks;
  const bool live = state.phase != Phase::done;
  if (state.detection_tick) {
    const std::int64_t end = state.accessible_tick ? *state.accessible_tick : tick;
    if (state.accessible_tick || live) clocks.t1 = seconds(end - *state.detection_tick, dt);
  }
  if (state.accessible_tick) {
    const std::int64_t end = state.graspable_tick ? *state.graspable_tick : tick;
    if (state.graspable_tick || live) clocks.t2 = seconds(end - *state.accessible_tick, dt);
  }
  return clocks;
}

}  // namespace viia::guidance
