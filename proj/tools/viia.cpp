#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "viia/harness.hpp"
#include "viia/service.hpp"

using namespace viia;

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

io::Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  io::Json j = io::Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument(path + ": malformed JSON");
  return j;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, unsigned jobs) {
  const auto config = harness::experiment_config_from_json(read_json_file(config_path));
  harness::ExperimentOptions options;
  options.jobs = jobs;
  options.stop = &g_stop;
  const auto result = harness::run_experiment(config, options);
  harness::write_results(out_dir, result.records);
  if (!result.records.empty()) std::cout << harness::to_json(harness::summarize(result.records)).dump(2) << '\n';
  if (result.interrupted) {
    std::cerr << "interrupted: wrote " << result.records.size() << " records to " << out_dir << '\n';
    return 130;
  }
  return 0;
}

int cmd_trial(const std::string& config_path, const std::string& subject_id, std::uint64_t seed,
              std::optional<int> placement, std::optional<int> previous, bool watch,
              const std::vector<std::string>& commands) {
  harness::ExperimentConfig config;
  config.subjects.push_back({"S1", {}});
  if (!config_path.empty()) config = harness::experiment_config_from_json(read_json_file(config_path));
  const harness::SubjectConfig* subject = &config.subjects.front();
  if (!subject_id.empty()) {
    subject = nullptr;
    for (const auto& s : config.subjects) {
      if (s.id == subject_id) subject = &s;
    }
    if (!subject) throw std::invalid_argument("unknown subject '" + subject_id + "'");
  }

  harness::TrialOptions options;
  options.forced_placement = placement;
  for (const auto& text : commands) {
    const auto parsed = voice::parse(text);
    if (const auto* e = std::get_if<voice::ParseError>(&parsed)) {
      throw std::invalid_argument("--command '" + text + "': " + e->message);
    }
    options.commands.push_back(std::get<voice::Command>(parsed));
  }
  if (watch) options.on_frame = [](const sim::Frame& f) { std::cout << io::to_json(f).dump() << '\n'; };
  const auto record = harness::run_trial(config.sim, *subject, 1, previous, seed, options);
  std::cout << harness::to_json(record).dump() << '\n';
  return record.success ? 0 : 1;
}

int cmd_summarize(const std::string& in_path) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);
  std::cout << harness::to_json(harness::summarize(harness::read_csv(in))).dump(2) << '\n';
  return 0;
}

int cmd_serve(bool pipe, const std::string& address, unsigned short port) {
  if (pipe) {
    service::run_pipe(std::cin, std::cout);
    return 0;
  }
  service::ServerOptions options;
  options.address = address;
  options.port = port;
  options.on_listen = [&](unsigned short bound) {
    std::cerr << "listening on ws://" << address << ':' << bound << '\n';
  };
  service::Server server(options);
  server.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audio-guided grasping simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a full experiment and write records");
  std::string run_config;
  std::string run_out = "results";
  unsigned jobs = 1;
  run->add_option("--config", run_config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--jobs", jobs, "Parallel trials")->check(CLI::PositiveNumber);

  auto* trial = app.add_subcommand("trial", "Run one trial");
  std::string trial_config;
  std::string subject;
  std::uint64_t seed = 1;
  std::optional<int> placement;
  std::optional<int> previous;
  bool watch = false;
  std::vector<std::string> commands;
  trial->add_option("--config", trial_config, "Experiment config JSON")->check(CLI::ExistingFile);
  trial->add_option("--subject", subject, "Subject id from the config");
  trial->add_option("--seed", seed, "Trial seed");
  trial->add_option("--placement", placement, "Force the placement index");
  trial->add_option("--previous", previous, "Previous placement index");
  trial->add_flag("--watch", watch, "Print every frame as a JSON line");
  trial->add_option("--command", commands, "Scripted utterance, repeatable (default: \"grasp bottle\")");

  auto* summarize = app.add_subcommand("summarize", "Summarize a records CSV");
  std::string summarize_in;
  summarize->add_option("--in", summarize_in, "records.csv")->required()->check(CLI::ExistingFile);

  auto* serve = app.add_subcommand("serve", "Serve sessions over WebSocket or a stdin/stdout pipe");
  bool pipe = false;
  std::string address = "127.0.0.1";
  unsigned short port = 8765;
  serve->add_flag("--pipe", pipe, "Newline-delimited JSON on stdin/stdout");
  serve->add_option("--address", address, "Bind address");
  serve->add_option("--port", port, "TCP port");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      // Trials in flight finish; the rest are skipped and the partial records flushed.
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      return cmd_run(run_config, run_out, jobs);
    }
    if (*trial) return cmd_trial(trial_config, subject, seed, placement, previous, watch, commands);
    if (*summarize) return cmd_summarize(summarize_in);
    if (*serve) return cmd_serve(pipe, address, port);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
