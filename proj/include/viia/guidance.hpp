#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "viia/control.hpp"
#include "viia/perception.hpp"
#include "viia/thresholds.hpp"
#include "viia/world.hpp"

namespace viia::guidance {

// Voice prompts of the trial protocol, byte-exact.
namespace prompts {
inline constexpr std::string_view kDetecting = "real-time detection in progress";
inline constexpr std::string_view kAccessible = "reached the accessible range";
inline constexpr std::string_view kGraspable = "reached the graspable range";
inline constexpr std::string_view kSuccess = "This grasp task is over, grasp is successful";
inline constexpr std::string_view kFailure = "This grasp task is over, grasp is failed";
}  // namespace prompts

namespace warnings {
inline constexpr std::string_view kTaskInProgress = "task already in progress";
inline constexpr std::string_view kNoTask = "no task in progress";
inline constexpr std::string_view kTaskOver = "task is over";
inline constexpr std::string_view kCannotClose = "hand can close only in the graspable range";
inline constexpr std::string_view kNothingToRelease = "hand is not holding a grasp";
}  // namespace warnings

enum class Phase { idle, detecting, navigating, aligning, graspable, grasping, done };
inline constexpr int kPhaseCount = 7;

std::string_view to_string(Phase phase);

enum class Intent { start_task, abort, close_hand, open_hand };

std::string_view to_string(Intent intent);

enum class EventKind { prompt, warning, status };

std::string_view to_string(EventKind kind);

struct Event {
  EventKind kind = EventKind::prompt;
  std::string text;
  std::int64_t tick = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

struct GuidanceState {
  Phase phase = Phase::idle;
  bool success = false;
  std::string fail_reason;  // timeout, aborted, or a grasp reason code
  std::optional<std::int64_t> detection_tick;
  std::optional<std::int64_t> accessible_tick;
  std::optional<std::int64_t> graspable_tick;
  int dwell_count = 0;
  std::optional<control::GraspOutcome> outcome;
  unsigned entered = 1u << static_cast<int>(Phase::idle);  // bit per phase

  bool has_entered(Phase p) const { return (entered >> static_cast<int>(p)) & 1u; }
};

struct GuidanceInput {
  const world::WorldState& world;
  std::span<const perception::GlobalDetection> global;
  std::optional<perception::LocalDetection> local;
  std::optional<Intent> intent;
  control::ProsthesisState prosthesis;
  control::ControlParams control;
};

struct Transition {
  GuidanceState next;
  std::vector<Event> events;
  std::optional<control::GraspOutcome> grasp;  // set on the close-hand tick
};

// One tick of the protocol state machine. At most one phase change per call.
Transition guidance_step(const GuidanceState& state, const GuidanceInput& input,
                         const Thresholds& thresholds);

// Normalized alignment error fed to the proximity cue; infinite without a detection.
double alignment_error(const std::optional<perception::LocalDetection>& local, const Thresholds& thresholds);

bool graspable_now(const std::optional<perception::LocalDetection>& local, const Thresholds& thresholds);

std::vector<std::pair<Phase, Phase>> declared_edges();

struct TrialClocks {
  double t1 = 0.0;
  double t2 = 0.0;
};

// Reach and alignment times from a trial's prompt log. Phases never reached
// report the timeout value.
TrialClocks trial_clocks(std::span<const Event> events, double dt, double timeout);

struct RunningClocks {
  std::optional<double> t1;
  std::optional<double> t2;
};

RunningClocks running_clocks(const GuidanceState& state, std::int64_t tick, double dt);

}  // namespace viia::guidance
