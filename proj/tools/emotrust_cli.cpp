// Command-line driver: `emotrust run` for one simulation, `emotrust experiment`
// for a parameter sweep with replications.

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "emotrust/config.hpp"
#include "emotrust/engine.hpp"
#include "emotrust/experiment.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNotTerminated = 3;
constexpr int kExitIo = 4;

using emotrust::harness::Settings;

/// One string-valued option per config key; only options actually given on
/// the command line are forwarded, so the file keeps its precedence slot.
struct KeyFlags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App& app, std::string_view key, const std::string& help,
              const std::string& alias = {}) {
    auto& slot = values[std::string(key)];
    std::string names = "--" + std::string(key);
    if (!alias.empty()) names += ",--" + alias;
    options[std::string(key)] = app.add_option(names, slot, help);
  }

  Settings given() const {
    Settings out;
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) out.emplace_back(key, values.at(key));
    }
    return out;
  }
};

std::unique_ptr<std::ofstream> open_output(const std::string& path) {
  auto out = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
  if (!*out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emotional trust carrier simulation"};
  app.require_subcommand(1);

  // run ---------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "Run one simulation and emit its JSONL event log");
  std::string run_config;
  std::string run_log = "-";
  std::string run_trace;
  bool run_quiet = false;
  KeyFlags run_flags;
  run_cmd->add_option("--config", run_config, "Flat key = value config file");
  run_cmd->add_option("--log", run_log, "Event log path ('-' for stdout)");
  run_cmd->add_option("--trace", run_trace, "Write only protocol messages (JSONL) to this path");
  run_cmd->add_flag("--quiet", run_quiet, "Do not print the event log to stdout");
  for (auto key : emotrust::harness::sim_config_keys()) run_flags.attach(*run_cmd, key, "config key");

  // experiment --------------------------------------------------------
  auto* exp_cmd = app.add_subcommand("experiment", "Sweep one variable across scenarios and replications");
  std::string exp_config;
  std::string exp_out;
  std::string exp_summary;
  unsigned threads = 0;
  KeyFlags exp_flags;
  exp_cmd->add_option("--config", exp_config, "Flat key = value config file");
  exp_cmd->add_option("--out", exp_out, "Per-run CSV output path")->required();
  exp_cmd->add_option("--summary", exp_summary, "Summary CSV output path");
  exp_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
  exp_flags.attach(*exp_cmd, "sweep", "idle_fraction or privacy_prob");
  exp_flags.attach(*exp_cmd, "values", "Comma-separated sweep values");
  exp_flags.attach(*exp_cmd, "reps", "Replications per point");
  exp_flags.attach(*exp_cmd, "scenarios", "Comma-separated scenarios", "scenario");
  for (auto key : emotrust::harness::sim_config_keys()) {
    if (key == "scenario") continue;
    exp_flags.attach(*exp_cmd, key, "base config key");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const Settings file = run_config.empty() ? Settings{} : emotrust::harness::read_settings_file(run_config);
      const auto config = emotrust::harness::parse_config(file, run_flags.given());

      std::unique_ptr<std::ofstream> log_file;
      std::unique_ptr<std::ofstream> trace_file;
      if (run_log != "-") log_file = open_output(run_log);
      if (!run_trace.empty()) trace_file = open_output(run_trace);

      const auto result = emotrust::run(config, true);
      if (log_file) {
        result.log.write(*log_file);
      } else if (!run_quiet) {
        result.log.write(std::cout);
      }
      if (trace_file) {
        for (const auto& m : result.messages) *trace_file << emotrust::message_json(m) << '\n';
      }
      std::cerr << "scenario=" << emotrust::to_string(config.scenario) << " seed=" << config.seed
                << " cycles=" << result.cycles << " terminated=" << (result.terminated ? "yes" : "no")
                << " reward=" << emotrust::harness::format_number(result.total_reward)
                << " on_time=" << result.on_time << " late=" << result.late
                << " disclosures=" << result.disclosures << " cfp=" << result.cfp_sent << '/'
                << result.cfp_accepted << '/' << result.cfp_refused << '\n';
      return result.terminated ? 0 : kExitNotTerminated;
    }

    const Settings file = exp_config.empty() ? Settings{} : emotrust::harness::read_settings_file(exp_config);
    const auto spec = emotrust::harness::parse_experiment(file, exp_flags.given());

    // Fail on unwritable paths before spending time on the runs.
    auto csv = open_output(exp_out);
    std::unique_ptr<std::ofstream> summary_file;
    if (!exp_summary.empty()) summary_file = open_output(exp_summary);

    const auto rows = emotrust::harness::run_experiment(spec, threads);
    emotrust::harness::write_rows_csv(*csv, rows);
    const auto cells = emotrust::harness::summarize(rows);
    if (summary_file) emotrust::harness::write_summary_csv(*summary_file, cells);
    emotrust::harness::write_summary_table(std::cout, cells, spec.sweep);

    const auto unfinished = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.terminated; });
    if (unfinished > 0) {
      std::cerr << unfinished << " run(s) hit the cycle cap\n";
      return kExitNotTerminated;
    }
    return 0;
  } catch (const emotrust::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}
