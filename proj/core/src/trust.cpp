#include "emotrust/trust.hpp"

#include <algorithm>
#include <stdexcept>

namespace emotrust::trust {

namespace {
double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }
}  // namespace

double mood_modifier(affect::MoodLabel label) {
  using affect::MoodLabel;
  switch (label) {
    case MoodLabel::joy:
    case MoodLabel::surprise:
      return -kMoodModifier;
    case MoodLabel::sad:
    case MoodLabel::fearful:
    case MoodLabel::angry:
      return kMoodModifier;
    case MoodLabel::neutral:
      return 0.0;
  }
  return 0.0;
}

double required_trust_to_request(const DecisionContext& ctx, double base) {
  double required = base + mood_modifier(ctx.mood);
  if (ctx.own_privacy_involved) required -= kPrivacyRelief;
  required -= kPerBoxModifier * ctx.load;
  return clamp_unit(required);
}

double required_trust_to_accept(const DecisionContext& ctx, double base) {
  double required = base + mood_modifier(ctx.mood);
  if (ctx.own_privacy_involved) required -= kPrivacyRelief;
  required += kPerBoxModifier * ctx.load;
  return clamp_unit(required);
}

bool decide(double trust_in_peer, double required) {
  return trust_in_peer + kDecisionTolerance >= required;
}

TrustStore::TrustStore(double default_trust, double base_threshold)
    : default_trust_(default_trust), base_threshold_(base_threshold) {
  if (default_trust < 0.0 || default_trust > 1.0 || base_threshold < 0.0 || base_threshold > 1.0) {
    throw std::invalid_argument("trust defaults must lie in [0, 1]");
  }
}

double TrustStore::trust_in(AgentId peer) const {
  auto it = trust_.find(peer);
  return it == trust_.end() ? default_trust_ : it->second;
}

void TrustStore::update_on_outcome(AgentId peer, int delay_cycles) {
  if (delay_cycles < 0) throw std::invalid_argument("delay_cycles must be non-negative");
  const double current = trust_in(peer);
  const double next = delay_cycles == 0 ? current + kOnTimeGain
                                        : current - kDelayLossPerCycle * delay_cycles;
  trust_[peer] = clamp_unit(next);
}

}  // namespace emotrust::trust
