#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emotrust/engine.hpp"

namespace emotrust::harness {

enum class SweepVariable { idle_fraction, privacy_prob };

std::string_view to_string(SweepVariable v);

/// A sweep over one variable, every listed scenario, `replications` seeds.
/// Replication r runs with seed `base.seed + r`.
struct ExperimentSpec {
  SweepVariable sweep = SweepVariable::idle_fraction;
  std::vector<double> values{0.0, 0.2, 0.4, 0.6, 0.8};
  std::vector<Scenario> scenarios{Scenario::notrust, Scenario::noemotions, Scenario::emotionaltrust};
  int replications = 100;
  SimConfig base;

  void validate() const;

  /// Config for one cell of the sweep.
  SimConfig config_for(Scenario scenario, double value, int replication) const;
};

/// Ordered key/value pairs as read from a file or the command line.
using Settings = std::vector<std::pair<std::string, std::string>>;

/// Flat `key = value` text; blank lines and `#` comments are ignored.
Settings parse_settings(std::istream& in, std::string_view source = "config");
Settings read_settings_file(const std::string& path);

/// Every key accepted by `apply_setting(SimConfig&, ...)`.
const std::vector<std::string_view>& sim_config_keys();
/// Experiment-only keys: sweep, values, scenarios, reps.
const std::vector<std::string_view>& experiment_keys();

/// Throws ConfigError naming the key for unknown keys and malformed or
/// out-of-range values.
void apply_setting(SimConfig& config, std::string_view key, std::string_view value);
void apply_setting(ExperimentSpec& spec, std::string_view key, std::string_view value);

/// Defaults, then `file`, then `flags`; the result is validated.
SimConfig parse_config(const Settings& file, const Settings& flags);
ExperimentSpec parse_experiment(const Settings& file, const Settings& flags);

/// `key = value` lines that `parse_settings` reads back to the same config.
std::string to_settings_text(const SimConfig& config);

}  // namespace emotrust::harness
