#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "viia/agent.hpp"
#include "viia/feedback.hpp"
#include "viia/simulation.hpp"
#include "viia/world.hpp"

namespace viia::io {

using Json = nlohmann::json;

// Wire and log schema version carried by every frame and message.
inline constexpr int kSchemaVersion = 1;

Json to_json(const feedback::AudioCue& cue);
Json to_json(const world::SceneObject& object);
Json to_json(const guidance::Event& event);
Json to_json(const control::ProsthesisState& prosthesis);
Json to_json(const sim::Frame& frame);
// Full state including the generator, for logs and replay.
Json to_json(const world::WorldState& state);

// Keys are emitted in sorted order, so equal documents dump to equal bytes.
inline std::string canonical(const Json& j) { return j.dump(); }

// Config readers reject unknown keys and wrong types with std::invalid_argument.
void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view where);

// Reads the simulation keys of `j` (arena, thresholds, cameras, ...) and
// ignores the keys listed in `extra`, which belong to the caller.
sim::SimConfig sim_config_from_json(const Json& j, std::initializer_list<std::string_view> extra = {});
agent::AgentParams agent_params_from_json(const Json& j);
Json to_json(const agent::AgentParams& params);
Json to_json(const sim::SimConfig& config);

}  // namespace viia::io
