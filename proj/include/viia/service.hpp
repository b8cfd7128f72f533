#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "viia/harness.hpp"
#include "viia/serialization.hpp"
#include "viia/simulation.hpp"

namespace viia::service {

using io::Json;

// Accepted by create_session: the simulation keys plus the ones below.
struct SessionConfig {
  sim::SimConfig sim;
  agent::AgentParams agent;
  std::uint64_t seed = 1;
  sim::DriveMode mode = sim::DriveMode::agent_driven;
  std::optional<int> placement;           // force the first placement
  std::optional<int> previous_placement;  // constrain the first draw
  std::string subject_id = "session";
};

// Throws std::invalid_argument with a readable message.
SessionConfig session_config_from_json(const Json& j);

// Human tick pacing (20 ms).
inline constexpr int kTickPeriodMs = 20;

class Session {
 public:
  Session(std::string id, SessionConfig config);

  // Returns the acknowledgment for one client message. Recognized types:
  // command, input, set_mode, pause, resume, history.
  Json handle_client_message(const Json& msg);

  // Advances one tick and returns the frame.
  Json tick_frame();

  // Whether the loop should advance on its own: human sessions tick while not
  // paused; agent sessions only while a trial is running or a command waits.
  bool wants_tick() const;

  const std::string& id() const { return id_; }
  bool paused() const { return paused_; }
  sim::DriveMode mode() const { return sim_.mode(); }
  const sim::Simulation& simulation() const { return sim_; }
  const std::vector<harness::TrialRecord>& history() const { return history_; }

 private:
  Json ack(const Json& msg, std::string_view status) const;

  std::string id_;
  SessionConfig config_;
  sim::Simulation sim_;
  bool paused_ = false;
  bool pending_command_ = false;
  bool recorded_ = false;
  std::vector<harness::TrialRecord> history_;
};

// Owns the sessions of one server. Not thread-safe; callers serialize.
class SessionRegistry {
 public:
  // Returns the new session id, or throws std::invalid_argument.
  std::string create_session(const Json& config);
  Session* find(const std::string& id);
  void erase(const std::string& id);
  std::size_t size() const { return sessions_.size(); }

 private:
  std::map<std::string, std::unique_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

// One connection's view of the protocol: it starts without a session, a
// create_session message binds one, and every later message goes to it.
// Outgoing messages are handed to `send` in order.
class Connection {
 public:
  Connection(SessionRegistry& registry, std::function<void(const Json&)> send);
  ~Connection();

  // Handles one raw text message (JSON). The "step" message, which advances
  // the bound session synchronously, is accepted only when `lockstep` is set.
  void on_text(const std::string& text, bool lockstep);
  Session* session() const { return session_; }
  // Ticks once and sends the frame.
  void tick();

 private:
  void send_error(const Json& msg, const std::string& message);

  SessionRegistry& registry_;
  std::function<void(const Json&)> send_;
  Session* session_ = nullptr;
};

// Newline-delimited JSON over a stream pair, lockstep: ticks happen only on
// "step" messages. Returns when the input ends or a "quit" message arrives.
void run_pipe(std::istream& in, std::ostream& out);

// Blocking WebSocket server. Each connection gets its own session loop on a
// single io_context. `on_listen` receives the bound port (useful with port 0).
struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;
  std::function<void(unsigned short)> on_listen;
};

class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  void run();   // blocks until stop()
  void stop();  // thread-safe

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace viia::service
