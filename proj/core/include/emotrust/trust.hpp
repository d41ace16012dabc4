#pragma once

#include <map>

#include "emotrust/affect.hpp"
#include "emotrust/types.hpp"

namespace emotrust::trust {

inline constexpr double kMoodModifier = 0.1;
inline constexpr double kPrivacyRelief = 0.1;
inline constexpr double kPerBoxModifier = 0.05;
inline constexpr double kOnTimeGain = 0.1;
inline constexpr double kDelayLossPerCycle = 0.05;

/// Slack used when comparing trust against a required level. Both sides are
/// sums of 0.05 steps, which do not round-trip exactly in binary floating point.
inline constexpr double kDecisionTolerance = 1e-9;

struct DecisionContext {
  affect::MoodLabel mood = affect::MoodLabel::neutral;
  bool own_privacy_involved = false;
  int load = 0;
};

/// Joy/surprise lower the required trust, sad/fearful/angry raise it.
double mood_modifier(affect::MoodLabel label);

/// Requester side: `load` counts boxes the requester already carries.
double required_trust_to_request(const DecisionContext& ctx, double base);

/// Responder side: `load` counts boxes the responder carries or has been assigned.
double required_trust_to_accept(const DecisionContext& ctx, double base);

bool decide(double trust_in_peer, double required);

/// Pairwise trust held by one agent about its peers.
class TrustStore {
 public:
  TrustStore() = default;
  TrustStore(double default_trust, double base_threshold);

  /// Unknown peers read as the default without being inserted.
  double trust_in(AgentId peer) const;

  /// On-time (`delay_cycles == 0`) adds 0.1; otherwise subtracts 0.05 per cycle.
  void update_on_outcome(AgentId peer, int delay_cycles);

  double default_trust() const { return default_trust_; }
  double base_threshold() const { return base_threshold_; }
  const std::map<AgentId, double>& entries() const { return trust_; }

 private:
  double default_trust_ = 0.5;
  double base_threshold_ = 0.5;
  std::map<AgentId, double> trust_;
};

}  // namespace emotrust::trust
