#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "viia/guidance.hpp"
#include "viia/world.hpp"

namespace viia::voice {

// Grammar (case-insensitive, whitespace-separated tokens):
//
//   command := ("grasp" | "find") noun | "stop" | "status" | "close" | "open"
//   noun    := "bottle"
enum class CommandKind { grasp, stop, status, close_hand, open_hand };

struct Command {
  CommandKind kind = CommandKind::status;
  std::optional<world::ObjectKind> target;  // set for grasp only

  friend bool operator==(const Command&, const Command&) = default;
};

enum class ParseErrorKind { unrecognized, unknown_target };

std::string_view to_string(ParseErrorKind kind);

struct ParseError {
  ParseErrorKind kind = ParseErrorKind::unrecognized;
  std::string message;
};

using ParseResult = std::variant<Command, ParseError>;

ParseResult parse(std::string_view utterance);

// Canonical utterance; parse(to_text(c)) == c.
std::string to_text(const Command& command);

struct SessionView {
  guidance::Phase phase = guidance::Phase::idle;
  std::optional<double> last_target_distance;
  std::int64_t tick = 0;
};

struct Dispatch {
  std::optional<guidance::Intent> intent;
  std::vector<guidance::Event> events;
};

// Maps a command onto a guidance intent. Phase validity is enforced by the
// guidance step, which answers invalid intents with warning events.
Dispatch dispatch(const Command& command, const SessionView& session);

}  // namespace viia::voice
