#include "emotrust/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

#include "emotrust/experiment.hpp"

namespace emotrust::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void malformed(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("invalid value for '" + std::string(key) + "': '" + std::string(value) +
                    "' (expected " + std::string(expected) + ")");
}

template <typename T>
T parse_number(std::string_view key, std::string_view text, std::string_view expected) {
  text = trim(text);
  T out{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) malformed(key, text, expected);
  return out;
}

int parse_int(std::string_view key, std::string_view v) { return parse_number<int>(key, v, "an integer"); }
double parse_real(std::string_view key, std::string_view v) { return parse_number<double>(key, v, "a number"); }

bool parse_bool(std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  malformed(key, v, "true or false");
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(trim(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

using Setter = std::function<void(SimConfig&, std::string_view key, std::string_view value)>;

const std::vector<std::pair<std::string_view, Setter>>& setters() {
  static const std::vector<std::pair<std::string_view, Setter>> table = [] {
    std::vector<std::pair<std::string_view, Setter>> t;
    auto integer = [&](std::string_view name, int SimConfig::*field) {
      t.emplace_back(name, [field](SimConfig& c, auto k, auto v) { c.*field = parse_int(k, v); });
    };
    auto real = [&](std::string_view name, double SimConfig::*field) {
      t.emplace_back(name, [field](SimConfig& c, auto k, auto v) { c.*field = parse_real(k, v); });
    };
    auto affect_real = [&](std::string_view name, double affect::AffectParams::*field) {
      t.emplace_back(name, [field](SimConfig& c, auto k, auto v) { c.affect.*field = parse_real(k, v); });
    };
    integer("grid_size", &SimConfig::grid_size);
    integer("n_packages", &SimConfig::n_packages);
    integer("n_agents", &SimConfig::n_agents);
    real("idle_fraction", &SimConfig::idle_fraction);
    real("privacy_prob", &SimConfig::privacy_prob);
    real("p_neurotic", &SimConfig::p_neurotic);
    real("p_psychotic", &SimConfig::p_psychotic);
    real("privacy_penalty", &SimConfig::privacy_penalty);
    real("ontime_reward", &SimConfig::ontime_reward);
    real("delay_penalty", &SimConfig::delay_penalty);
    real("base_threshold", &SimConfig::base_threshold);
    real("initial_trust", &SimConfig::initial_trust);
    t.emplace_back("scenario", [](SimConfig& c, auto k, auto v) {
      auto s = parse_scenario(trim(v));
      if (!s) malformed(k, v, "one of notrust, noemotions, emotionaltrust");
      c.scenario = *s;
    });
    real("deadline_slack", &SimConfig::deadline_slack);
    t.emplace_back("meeting_rule", [](SimConfig& c, auto k, auto v) {
      auto r = parse_meeting_rule(trim(v));
      if (!r) malformed(k, v, "colocated or encounter");
      c.meeting_rule = *r;
    });
    t.emplace_back("busy_rule", [](SimConfig& c, auto k, auto v) {
      auto r = parse_busy_rule(trim(v));
      if (!r) malformed(k, v, "carrying or delegable");
      c.busy_rule = *r;
    });
    integer("cycle_cap", &SimConfig::cycle_cap);
    t.emplace_back("seed", [](SimConfig& c, auto k, auto v) {
      c.seed = parse_number<std::uint64_t>(k, v, "a non-negative integer");
    });
    affect_real("delta_e", &affect::AffectParams::delta_e);
    affect_real("phi_e", &affect::AffectParams::phi_e);
    affect_real("v_p", &affect::AffectParams::v_p);
    affect_real("v_a", &affect::AffectParams::v_a);
    affect_real("v_d", &affect::AffectParams::v_d);
    t.emplace_back("decay_toward_zero", [](SimConfig& c, auto k, auto v) {
      c.affect.decay_toward_zero = parse_bool(k, v);
    });
    t.emplace_back("check_invariants", [](SimConfig& c, auto k, auto v) {
      c.check_invariants = parse_bool(k, v);
    });
    return t;
  }();
  return table;
}

}  // namespace

std::string_view to_string(SweepVariable v) {
  return v == SweepVariable::idle_fraction ? "idle_fraction" : "privacy_prob";
}

void ExperimentSpec::validate() const {
  if (replications < 1) {
    throw ConfigError("invalid value for 'reps': " + std::to_string(replications) +
                      " (legal range: integer >= 1)");
  }
  if (values.empty()) throw ConfigError("invalid value for 'values': empty (legal range: at least one value)");
  if (scenarios.empty()) {
    throw ConfigError("invalid value for 'scenarios': empty (legal range: subset of notrust, noemotions, emotionaltrust)");
  }
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    for (std::size_t j = i + 1; j < scenarios.size(); ++j) {
      if (scenarios[i] == scenarios[j]) {
        throw ConfigError("invalid value for 'scenarios': duplicate " + std::string(to_string(scenarios[i])));
      }
    }
  }
  for (double v : values) config_for(scenarios.front(), v, 0).validate();
}

SimConfig ExperimentSpec::config_for(Scenario scenario, double value, int replication) const {
  SimConfig c = base;
  c.scenario = scenario;
  if (sweep == SweepVariable::idle_fraction) {
    c.idle_fraction = value;
  } else {
    c.privacy_prob = value;
  }
  c.seed = base.seed + static_cast<std::uint64_t>(replication);
  return c;
}

Settings parse_settings(std::istream& in, std::string_view source) {
  Settings out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(source) + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    const auto key = trim(view.substr(0, eq));
    if (key.empty()) throw ConfigError(std::string(source) + ":" + std::to_string(number) + ": empty key");
    out.emplace_back(std::string(key), std::string(trim(view.substr(eq + 1))));
  }
  return out;
}

Settings read_settings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  return parse_settings(in, path);
}

const std::vector<std::string_view>& sim_config_keys() {
  static const std::vector<std::string_view> keys = [] {
    std::vector<std::string_view> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

const std::vector<std::string_view>& experiment_keys() {
  static const std::vector<std::string_view> keys{"sweep", "values", "scenarios", "reps"};
  return keys;
}

void apply_setting(SimConfig& config, std::string_view key, std::string_view value) {
  for (const auto& [name, set] : setters()) {
    if (name == key) {
      set(config, key, value);
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

void apply_setting(ExperimentSpec& spec, std::string_view key, std::string_view value) {
  if (key == "sweep") {
    const auto v = trim(value);
    if (v == "idle_fraction" || v == "idle") {
      spec.sweep = SweepVariable::idle_fraction;
    } else if (v == "privacy_prob" || v == "privacy") {
      spec.sweep = SweepVariable::privacy_prob;
    } else {
      malformed(key, value, "idle_fraction or privacy_prob");
    }
  } else if (key == "values") {
    spec.values.clear();
    for (auto item : split_list(value)) spec.values.push_back(parse_real(key, item));
  } else if (key == "scenarios" || key == "scenario") {
    spec.scenarios.clear();
    for (auto item : split_list(value)) {
      auto s = parse_scenario(item);
      if (!s) malformed(key, item, "notrust, noemotions or emotionaltrust");
      spec.scenarios.push_back(*s);
    }
  } else if (key == "reps" || key == "replications") {
    spec.replications = parse_int(key, value);
  } else {
    apply_setting(spec.base, key, value);
  }
}

SimConfig parse_config(const Settings& file, const Settings& flags) {
  SimConfig config;
  for (const auto& [k, v] : file) apply_setting(config, k, v);
  for (const auto& [k, v] : flags) apply_setting(config, k, v);
  config.validate();
  return config;
}

ExperimentSpec parse_experiment(const Settings& file, const Settings& flags) {
  ExperimentSpec spec;
  for (const auto& [k, v] : file) apply_setting(spec, k, v);
  for (const auto& [k, v] : flags) apply_setting(spec, k, v);
  spec.base.validate();
  spec.validate();
  return spec;
}

std::string to_settings_text(const SimConfig& c) {
  std::ostringstream os;
  auto line = [&](std::string_view k, const std::string& v) { os << k << " = " << v << '\n'; };
  line("grid_size", std::to_string(c.grid_size));
  line("n_packages", std::to_string(c.n_packages));
  line("n_agents", std::to_string(c.n_agents));
  line("idle_fraction", format_number(c.idle_fraction));
  line("privacy_prob", format_number(c.privacy_prob));
  line("p_neurotic", format_number(c.p_neurotic));
  line("p_psychotic", format_number(c.p_psychotic));
  line("privacy_penalty", format_number(c.privacy_penalty));
  line("ontime_reward", format_number(c.ontime_reward));
  line("delay_penalty", format_number(c.delay_penalty));
  line("base_threshold", format_number(c.base_threshold));
  line("initial_trust", format_number(c.initial_trust));
  line("scenario", std::string(to_string(c.scenario)));
  line("deadline_slack", format_number(c.deadline_slack));
  line("meeting_rule", std::string(to_string(c.meeting_rule)));
  line("busy_rule", std::string(to_string(c.busy_rule)));
  line("cycle_cap", std::to_string(c.cycle_cap));
  line("seed", std::to_string(c.seed));
  line("delta_e", format_number(c.affect.delta_e));
  line("phi_e", format_number(c.affect.phi_e));
  line("v_p", format_number(c.affect.v_p));
  line("v_a", format_number(c.affect.v_a));
  line("v_d", format_number(c.affect.v_d));
  line("decay_toward_zero", c.affect.decay_toward_zero ? "true" : "false");
  line("check_invariants", c.check_invariants ? "true" : "false");
  return os.str();
}

}  // namespace emotrust::harness
