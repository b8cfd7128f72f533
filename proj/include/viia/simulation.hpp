#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "viia/agent.hpp"
#include "viia/control.hpp"
#include "viia/feedback.hpp"
#include "viia/guidance.hpp"
#include "viia/perception.hpp"
#include "viia/thresholds.hpp"
#include "viia/voice.hpp"
#include "viia/world.hpp"

namespace viia::sim {

struct SimConfig {
  world::ArenaConfig arena;
  Thresholds thresholds;
  perception::CameraModel global_camera = perception::default_global_camera();
  perception::CameraModel local_camera = perception::default_local_camera();
  control::ControlParams control;
  feedback::CueParams cue;
  world::WristPose initial_wrist;
  Vec3 bottle_axis{0.0, 0.0, 1.0};
  double tremor_correlation = 0.9;

  void validate() const;
};

enum class DriveMode { agent_driven, human_driven };

std::string_view to_string(DriveMode mode);

// Everything a client sees for one tick.
struct Frame {
  std::int64_t tick = 0;
  guidance::Phase phase = guidance::Phase::idle;
  world::AvatarPose avatar;
  world::WristPose wrist;  // effective pose, tremor included
  std::optional<feedback::AudioCue> audio_cue;
  std::optional<std::string> prompt;
  std::vector<guidance::Event> events;  // warnings and status replies
  control::ProsthesisState prosthesis;
  guidance::RunningClocks clocks;
  std::optional<double> alignment_error;
  std::vector<world::SceneObject> objects;
  int placement_index = 0;
};

// Random streams split from one trial seed.
enum Stream : std::uint32_t { kWorldStream = 0, kSensorStream = 1, kAgentStream = 2 };

// One closed loop: perception, guidance, feedback, agent or human input,
// control, then world kinematics, once per tick.
class Simulation {
 public:
  Simulation(SimConfig config, agent::AgentParams agent, std::uint64_t seed,
             std::optional<int> previous_placement, std::optional<int> forced_placement = std::nullopt);

  // Queued; applied at the next tick boundary.
  void submit(const voice::Command& command);
  void set_human_input(const world::StepInput& input) { human_input_ = input; }
  void set_mode(DriveMode mode) { mode_ = mode; }

  Frame tick();

  bool finished() const { return guidance_.phase == guidance::Phase::done; }
  DriveMode mode() const { return mode_; }
  int placement() const { return placement_; }
  std::uint64_t seed() const { return seed_; }
  const SimConfig& config() const { return config_; }
  const world::WorldState& world() const { return world_; }
  const guidance::GuidanceState& guidance() const { return guidance_; }
  const control::ProsthesisState& prosthesis() const { return prosthesis_; }
  const std::vector<guidance::Event>& log() const { return log_; }
  std::optional<double> last_target_distance() const { return last_target_distance_; }
  int trials_started() const { return trials_started_; }

 private:
  void begin_trial(std::optional<int> forced_placement);
  std::optional<guidance::Intent> take_intent(std::vector<guidance::Event>& events);

  SimConfig config_;
  agent::AgentParams agent_params_;
  std::uint64_t seed_;
  DriveMode mode_ = DriveMode::agent_driven;

  world::WorldState world_;
  Rng sensor_rng_;
  Rng agent_rng_;
  guidance::GuidanceState guidance_;
  control::ProsthesisState prosthesis_;
  agent::AgentState agent_;
  std::optional<guidance::Intent> agent_intent_;
  world::StepInput human_input_;
  std::deque<voice::Command> commands_;
  std::vector<guidance::Event> log_;
  std::optional<double> last_target_distance_;
  std::optional<int> previous_placement_;
  int placement_ = 0;
  int trials_started_ = 0;
};

}  // namespace viia::sim
