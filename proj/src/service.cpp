#include "viia/service.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

namespace viia::service {

namespace {

constexpr std::string_view kSessionKeys[] = {"seed", "agent", "mode", "placement", "previous_placement",
                                             "subject_id"};

sim::DriveMode mode_from_string(const std::string& s) {
  if (s == "agent_driven") return sim::DriveMode::agent_driven;
  if (s == "human_driven") return sim::DriveMode::human_driven;
  throw std::invalid_argument("mode: expected agent_driven or human_driven, got '" + s + "'");
}

std::optional<int> placement_field(const Json& j, const char* key, const world::ArenaConfig& arena) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number_integer()) throw std::invalid_argument(std::string(key) + ": expected an integer");
  const int index = j.at(key).get<int>();
  if (index < 0 || index >= arena.segment_count) {
    throw std::invalid_argument(std::string(key) + ": out of range");
  }
  return index;
}

double number_or(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw std::invalid_argument(std::string(key) + ": expected a number");
  return j.at(key).get<double>();
}

world::StepInput input_from_json(const Json& msg) {
  world::StepInput in;
  in.forward_speed = number_or(msg, "forward_speed", 0.0);
  in.turn_rate = number_or(msg, "turn_rate", 0.0);
  if (msg.contains("wrist")) {
    const auto& w = msg.at("wrist");
    if (!w.is_object()) throw std::invalid_argument("wrist: expected an object");
    in.wrist.offset = {number_or(w, "dx", 0.0), number_or(w, "dy", 0.0), number_or(w, "dz", 0.0)};
    in.wrist.aim_azimuth = number_or(w, "aim_azimuth", 0.0);
    in.wrist.aim_elevation = number_or(w, "aim_elevation", 0.0);
    in.wrist.rotation = number_or(w, "rotation", 0.0);
  }
  return in;
}

}  // namespace

SessionConfig session_config_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected an object");
  SessionConfig c;
  c.sim = io::sim_config_from_json(
      j, {kSessionKeys[0], kSessionKeys[1], kSessionKeys[2], kSessionKeys[3], kSessionKeys[4], kSessionKeys[5]});
  try {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("mode")) c.mode = mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("subject_id")) c.subject_id = j.at("subject_id").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (j.contains("agent")) c.agent = io::agent_params_from_json(j.at("agent"));
  c.placement = placement_field(j, "placement", c.sim.arena);
  c.previous_placement = placement_field(j, "previous_placement", c.sim.arena);
  c.agent.validate(c.sim.arena.max_forward_speed);
  return c;
}

// ---------------------------------------------------------------------------

Session::Session(std::string id, SessionConfig config)
    : id_(std::move(id)),
      config_(std::move(config)),
      sim_(config_.sim, config_.agent, config_.seed, config_.previous_placement, config_.placement) {
  sim_.set_mode(config_.mode);
}

Json Session::ack(const Json& msg, std::string_view status) const {
  Json a = {{"schema_version", io::kSchemaVersion},
            {"type", "ack"},
            {"session_id", id_},
            {"status", status},
            {"request", msg.is_object() && msg.contains("type") ? msg.at("type") : Json(nullptr)}};
  if (msg.is_object() && msg.contains("id")) a["id"] = msg.at("id");
  return a;
}

Json Session::handle_client_message(const Json& msg) {
  if (!msg.is_object() || !msg.contains("type") || !msg.at("type").is_string()) {
    auto a = ack(msg, "error");
    a["message"] = "message must be an object with a string 'type'";
    return a;
  }
  const auto type = msg.at("type").get<std::string>();

  if (type == "command") {
    if (!msg.contains("text") || !msg.at("text").is_string()) {
      auto a = ack(msg, "error");
      a["message"] = "command: expected a string 'text'";
      return a;
    }
    const auto result = voice::parse(msg.at("text").get<std::string>());
    if (const auto* error = std::get_if<voice::ParseError>(&result)) {
      auto a = ack(msg, "error");
      a["parse"] = {{"ok", false}, {"error", voice::to_string(error->kind)}, {"message", error->message}};
      return a;
    }
    const auto& command = std::get<voice::Command>(result);
    sim_.submit(command);
    pending_command_ = true;
    auto a = ack(msg, "ok");
    a["parse"] = {{"ok", true}, {"command", voice::to_text(command)}};
    return a;
  }

  if (type == "input") {
    if (sim_.mode() == sim::DriveMode::agent_driven) {
      auto a = ack(msg, "warning");
      a["message"] = "input ignored in agent_driven mode";
      return a;
    }
    try {
      sim_.set_human_input(input_from_json(msg));
    } catch (const std::invalid_argument& e) {
      auto a = ack(msg, "error");
      a["message"] = std::string("input: ") + e.what();
      return a;
    }
    return ack(msg, "ok");
  }

  if (type == "set_mode") {
    try {
      if (!msg.contains("mode") || !msg.at("mode").is_string()) throw std::invalid_argument("expected a string 'mode'");
      const auto mode = mode_from_string(msg.at("mode").get<std::string>());
      sim_.set_mode(mode);
      sim_.set_human_input({});
    } catch (const std::invalid_argument& e) {
      auto a = ack(msg, "error");
      a["message"] = std::string("set_mode: ") + e.what();
      return a;
    }
    auto a = ack(msg, "ok");
    a["mode"] = sim::to_string(sim_.mode());
    return a;
  }

  if (type == "pause" || type == "resume") {
    paused_ = type == "pause";
    return ack(msg, "ok");
  }

  if (type == "history") {
    auto a = ack(msg, "ok");
    Json records = Json::array();
    for (const auto& r : history_) records.push_back(harness::to_json(r));
    a["records"] = std::move(records);
    return a;
  }

  auto a = ack(msg, "error");
  a["message"] = "unknown message type '" + type + "'";
  return a;
}

Json Session::tick_frame() {
  const auto frame = sim_.tick();
  pending_command_ = false;
  if (!sim_.finished()) {
    recorded_ = false;
  } else if (!recorded_) {
    recorded_ = true;
    const auto& cfg = sim_.config();
    const auto clocks = guidance::trial_clocks(sim_.log(), cfg.arena.tick, cfg.thresholds.timeout);
    harness::TrialRecord r;
    r.subject_id = config_.subject_id;
    r.trial_index = static_cast<int>(history_.size()) + 1;
    r.placement_index = sim_.placement();
    r.seed = sim_.seed();
    r.t1 = clocks.t1;
    r.t2 = clocks.t2;
    r.success = sim_.guidance().success;
    if (!r.success) r.fail_reason = sim_.guidance().fail_reason;
    history_.push_back(std::move(r));
  }
  return io::to_json(frame);
}

bool Session::wants_tick() const {
  if (paused_) return false;
  if (sim_.mode() == sim::DriveMode::human_driven) return true;
  const auto phase = sim_.guidance().phase;
  return pending_command_ || (phase != guidance::Phase::idle && phase != guidance::Phase::done);
}

// ---------------------------------------------------------------------------

std::string SessionRegistry::create_session(const Json& config) {
  auto parsed = session_config_from_json(config);
  std::string id = "s" + std::to_string(next_id_++);
  sessions_.emplace(id, std::make_unique<Session>(id, std::move(parsed)));
  return id;
}

Session* SessionRegistry::find(const std::string& id) {
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second.get();
}

void SessionRegistry::erase(const std::string& id) { sessions_.erase(id); }

// ---------------------------------------------------------------------------

Connection::Connection(SessionRegistry& registry, std::function<void(const Json&)> send)
    : registry_(registry), send_(std::move(send)) {}

Connection::~Connection() {
  if (session_) registry_.erase(session_->id());
}

void Connection::send_error(const Json& msg, const std::string& message) {
  Json e = {{"schema_version", io::kSchemaVersion}, {"type", "error"}, {"message", message}};
  if (msg.is_object() && msg.contains("type")) e["request"] = msg.at("type");
  if (msg.is_object() && msg.contains("id")) e["id"] = msg.at("id");
  send_(e);
}

void Connection::tick() {
  if (session_) send_(session_->tick_frame());
}

void Connection::on_text(const std::string& text, bool lockstep) {
  const Json msg = Json::parse(text, nullptr, false);
  if (msg.is_discarded()) {
    send_error(nullptr, "malformed JSON");
    return;
  }
  const std::string type = msg.is_object() && msg.contains("type") && msg.at("type").is_string()
                               ? msg.at("type").get<std::string>()
                               : std::string();

  if (type == "create_session") {
    if (session_) {
      send_error(msg, "session already created on this connection");
      return;
    }
    try {
      const auto id = registry_.create_session(msg.contains("config") ? msg.at("config") : Json::object());
      session_ = registry_.find(id);
    } catch (const std::exception& e) {
      send_error(msg, e.what());
      return;
    }
    Json created = {{"schema_version", io::kSchemaVersion},
                    {"type", "session_created"},
                    {"session_id", session_->id()},
                    {"mode", sim::to_string(session_->mode())},
                    {"placement_index", session_->simulation().placement()}};
    if (msg.contains("id")) created["id"] = msg.at("id");
    send_(created);
    return;
  }

  if (!session_) {
    send_error(msg, "no session; send create_session first");
    return;
  }

  if (lockstep && type == "step") {
    std::int64_t ticks = 0;
    const bool until_done = msg.value("until", std::string()) == "done";
    const std::int64_t count = msg.contains("count") && msg.at("count").is_number_integer()
                                   ? msg.at("count").get<std::int64_t>()
                                   : 1;
    const auto& cfg = session_->simulation().config();
    const auto limit = until_done ? std::llround(cfg.thresholds.timeout / cfg.arena.tick) + 16 : count;
    for (; ticks < limit; ++ticks) {
      tick();
      if (until_done && session_->simulation().finished()) {
        ++ticks;
        break;
      }
    }
    Json a = {{"schema_version", io::kSchemaVersion}, {"type", "ack"},   {"session_id", session_->id()},
              {"status", "ok"},                       {"request", "step"}, {"ticks", ticks}};
    if (msg.contains("id")) a["id"] = msg.at("id");
    send_(a);
    return;
  }

  send_(session_->handle_client_message(msg));
}

void run_pipe(std::istream& in, std::ostream& out) {
  SessionRegistry registry;
  Connection connection(registry, [&](const Json& j) { out << j.dump() << '\n' << std::flush; });
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json probe = Json::parse(line, nullptr, false);
    if (!probe.is_discarded() && probe.is_object() && probe.value("type", std::string()) == "quit") break;
    connection.on_text(line, true);
  }
}

}  // namespace viia::service
