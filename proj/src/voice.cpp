#include "viia/voice.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

namespace viia::voice {

std::string_view to_string(ParseErrorKind kind) {
  return kind == ParseErrorKind::unknown_target ? "unknown_target" : "unrecognized";
}

namespace {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

class Parser {
 public:
  Parser(std::vector<std::string> tokens, std::string_view source)
      : tokens_(std::move(tokens)), source_(source) {}

  ParseResult command() {
    if (at_end()) return unrecognized();
    const std::string verb = next();
    ParseResult result = unrecognized();
    if (verb == "grasp" || verb == "find") {
      result = noun_phrase();
    } else if (verb == "stop") {
      result = Command{CommandKind::stop, std::nullopt};
    } else if (verb == "status") {
      result = Command{CommandKind::status, std::nullopt};
    } else if (verb == "close") {
      result = Command{CommandKind::close_hand, std::nullopt};
    } else if (verb == "open") {
      result = Command{CommandKind::open_hand, std::nullopt};
    }
    if (std::holds_alternative<Command>(result) && !at_end()) return unrecognized();
    return result;
  }

 private:
  ParseResult noun_phrase() {
    if (at_end()) return unrecognized();
    const std::string noun = next();
    if (noun == "bottle") return Command{CommandKind::grasp, world::ObjectKind::bottle};
    if (!at_end()) return unrecognized();
    return ParseError{ParseErrorKind::unknown_target, "unknown target '" + noun + "'"};
  }

  ParseError unrecognized() const {
    return {ParseErrorKind::unrecognized, "unrecognized command '" + std::string(source_) + "'"};
  }

  bool at_end() const { return pos_ >= tokens_.size(); }
  std::string next() { return tokens_[pos_++]; }

  std::vector<std::string> tokens_;
  std::string_view source_;
  std::size_t pos_ = 0;
};

std::string trimmed(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n\f\v");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

ParseResult parse(std::string_view utterance) {
  const std::string text = trimmed(utterance);
  return Parser(tokenize(text), text).command();
}

std::string to_text(const Command& command) {
  switch (command.kind) {
    case CommandKind::grasp:
      return "grasp " + std::string(world::to_string(command.target.value_or(world::ObjectKind::bottle)));
    case CommandKind::stop: return "stop";
    case CommandKind::status: return "status";
    case CommandKind::close_hand: return "close";
    case CommandKind::open_hand: return "open";
  }
  return {};
}

Dispatch dispatch(const Command& command, const SessionView& session) {
  using guidance::Intent;
  Dispatch out;
  switch (command.kind) {
    case CommandKind::grasp: out.intent = Intent::start_task; break;
    case CommandKind::stop: out.intent = Intent::abort; break;
    case CommandKind::close_hand: out.intent = Intent::close_hand; break;
    case CommandKind::open_hand: out.intent = Intent::open_hand; break;
    case CommandKind::status: {
      std::ostringstream text;
      text << "current phase " << guidance::to_string(session.phase) << ", target distance ";
      if (session.last_target_distance) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f meters", *session.last_target_distance);
        text << buf;
      } else {
        text << "unknown";
      }
      out.events.push_back({guidance::EventKind::status, text.str(), session.tick});
      break;
    }
  }
  return out;
}

}  // namespace viia::voice
