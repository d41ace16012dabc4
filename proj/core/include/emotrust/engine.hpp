#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "emotrust/affect.hpp"
#include "emotrust/agent.hpp"
#include "emotrust/event_log.hpp"
#include "emotrust/protocol.hpp"
#include "emotrust/rng.hpp"
#include "emotrust/trust.hpp"
#include "emotrust/world.hpp"

namespace emotrust {

enum class Scenario { notrust, noemotions, emotionaltrust };

/// Which co-located pairs count as a meeting in a cycle: every pair sharing a
/// cell, or only pairs that were not already together in the previous cycle.
enum class MeetingRule { colocated, encounter };

/// Which agents an idle carrier pursues: anyone carrying a box, or only
/// carriers holding more than one box (something they could delegate).
enum class BusyRule { carrying, delegable };

std::string_view to_string(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view name);
std::string_view to_string(MeetingRule r);
std::optional<MeetingRule> parse_meeting_rule(std::string_view name);
std::string_view to_string(BusyRule r);
std::optional<BusyRule> parse_busy_rule(std::string_view name);

/// Invalid configuration value. The message names the key, the offending
/// value and the legal range.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SimConfig {
  int grid_size = 30;
  int n_packages = 15;
  int n_agents = 15;
  double idle_fraction = 0.4;
  double privacy_prob = 0.2;
  double p_neurotic = 1.0 / 3.0;
  double p_psychotic = 1.0 / 3.0;
  double privacy_penalty = 2.0;
  double ontime_reward = 1.0;
  double delay_penalty = 2.0;
  double base_threshold = 0.5;
  double initial_trust = 0.5;
  Scenario scenario = Scenario::emotionaltrust;
  double deadline_slack = 1.5;
  int cycle_cap = 2000;
  std::uint64_t seed = 1;
  MeetingRule meeting_rule = MeetingRule::colocated;
  BusyRule busy_rule = BusyRule::carrying;
  affect::AffectParams affect;
#ifdef NDEBUG
  bool check_invariants = false;
#else
  bool check_invariants = true;
#endif

  /// Throws ConfigError on the first out-of-range field.
  void validate() const;

  /// Agents that start with no package: floor(idle_fraction * n_agents).
  int idle_agent_count() const;
};

/// Append-only reward book for one run.
class RewardLedger {
 public:
  enum class Kind { on_time, late, disclosure };

  struct Entry {
    int cycle;
    AgentId agent;
    double amount;
    Kind kind;
  };

  explicit RewardLedger(int n_agents = 0);

  void credit(int cycle, AgentId agent, double amount, Kind kind);
  void add_completion(AgentId agent);

  double total() const;
  double agent_total(AgentId agent) const { return totals_.at(static_cast<std::size_t>(agent)); }
  int completions(AgentId agent) const { return completions_.at(static_cast<std::size_t>(agent)); }
  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<double>& agent_totals() const { return totals_; }

  /// Accumulated reward divided by completed tasks; nullopt without completions.
  std::optional<double> reward_per_task(AgentId agent) const;
  /// Mean reward-per-task over agents with at least one completion.
  std::optional<double> mean_reward_per_task() const;

 private:
  std::vector<Entry> entries_;
  std::vector<double> totals_;
  std::vector<int> completions_;
};

/// What one agent observed at this cycle's meetings.
struct MeetingObservations {
  int angry_peers = 0;
  bool own_disclosure = false;
  bool alien_privacy = false;
};

affect::SourceVector source_vector(const MeetingObservations& seen);

/// Dominance change for holding `count` tasks after the count changed.
double task_count_dominance(int count);

struct DominanceInputs {
  int angry_peers_met = 0;
  int previous_task_count = 0;
  int task_count = 0;
  bool completed_task = false;
  std::optional<double> reward_per_task;
  std::optional<double> population_mean;
};

/// Dominance deltas fired this cycle: -0.1 per angry peer met, the task-count
/// rule when the count changed, and +/-0.1 on completion depending on how the
/// agent's reward per task compares with the population mean.
std::vector<double> dominance_events(const DominanceInputs& in);

struct RunResult {
  double total_reward = 0.0;
  int cycles = 0;
  bool terminated = false;
  int delivered = 0;
  int on_time = 0;
  int late = 0;
  int on_time_credits = 0;  ///< chain members credited for on-time deliveries
  int late_credits = 0;
  int disclosures = 0;
  int meetings = 0;
  int cfp_sent = 0;
  int cfp_accepted = 0;
  int cfp_refused = 0;
  int trust_decisions = 0;
  int nonzero_mood_modifiers = 0;
  std::vector<double> agent_rewards;
  std::vector<protocol::Message> messages;
  EventLog log{false};
};

/// One deterministic simulation. All randomness comes from a single stream
/// seeded by `config.seed`; initialization draws first, then per-cycle draws
/// in phase order.
class Simulation {
 public:
  struct Carrier {
    agent::Agent mind;
    trust::TrustStore trust;
    affect::PadState pad;
    affect::SourceVector previous_sources;
    int previous_task_count = 0;
  };

  explicit Simulation(SimConfig config, bool record_log = true);

  int cycle() const { return cycle_; }
  bool finished() const;

  /// Advances one cycle: perception, deliberation and movement, meetings,
  /// contract-net exchanges, deliveries, affect update, logging.
  void step();

  /// Steps until every package is delivered or the cycle cap is hit.
  RunResult run();

  /// Throws world::InvariantViolation on any broken bound or bookkeeping rule.
  void check_invariants() const;

  const SimConfig& config() const { return config_; }
  const world::World& world() const { return world_; }
  const std::vector<Carrier>& carriers() const { return carriers_; }
  const RewardLedger& ledger() const { return ledger_; }
  const protocol::ContractNet& contract_net() const { return net_; }
  const EventLog& log() const { return log_; }

  /// Mood an observer (or the trust gate) sees for `agent` right now.
  affect::MoodLabel visible_mood(AgentId agent) const;

 private:
  struct CycleNotes {
    MeetingObservations seen;
    std::vector<affect::EventDelta> pleasure;
    bool completed = false;
  };

  void initialize();
  void perceive();
  void deliberate_and_move();
  void run_meetings(std::vector<CycleNotes>& notes);
  void meet(AgentId a, AgentId b, std::vector<CycleNotes>& notes,
            const std::vector<affect::MoodLabel>& moods);
  bool try_delegation(AgentId initiator, AgentId responder,
                      const std::vector<affect::MoodLabel>& moods);
  bool request_gate(AgentId initiator, AgentId responder, PackageId pkg,
                    const std::vector<affect::MoodLabel>& moods);
  void settle_deliveries(std::vector<CycleNotes>& notes);
  void update_affect(const std::vector<CycleNotes>& notes);
  void log_pad_states();
  void log_message(const protocol::Message& m);
  void log_trust_decision(std::string_view role, AgentId decider, AgentId peer, PackageId pkg,
                          double trust_value, const trust::DecisionContext& ctx, double required,
                          bool outcome);

  SimConfig config_;
  Rng rng_;
  world::World world_;
  std::vector<Carrier> carriers_;
  RewardLedger ledger_;
  protocol::ContractNet net_;
  EventLog log_;
  int cycle_ = 0;
  std::set<std::pair<AgentId, AgentId>> together_;

  int on_time_ = 0;
  int late_ = 0;
  int on_time_credits_ = 0;
  int late_credits_ = 0;
  int disclosures_ = 0;
  int meetings_ = 0;
  int trust_decisions_ = 0;
  int nonzero_mood_modifiers_ = 0;
};

/// Convenience wrapper: build, run to completion, return the result.
RunResult run(const SimConfig& config, bool record_log = false);

}  // namespace emotrust
