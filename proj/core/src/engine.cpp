#include "emotrust/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace emotrust {

using json = nlohmann::ordered_json;

namespace {

constexpr double kPleasureStep = 0.1;
constexpr double kAngerDominance = -0.1;
constexpr double kPerformanceDominance = 0.1;
constexpr double kRewardTieTolerance = 1e-12;

template <typename T>
[[noreturn]] void reject(std::string_view key, const T& value, std::string_view range) {
  std::ostringstream os;
  os << "invalid value for '" << key << "': " << value << " (legal range: " << range << ")";
  throw ConfigError(os.str());
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

SimConfig validated(SimConfig config) {
  config.validate();
  return config;
}

json cell_json(Cell c) { return json::array({c.x, c.y}); }

}  // namespace

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::notrust: return "notrust";
    case Scenario::noemotions: return "noemotions";
    case Scenario::emotionaltrust: return "emotionaltrust";
  }
  return "emotionaltrust";
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  for (auto s : {Scenario::notrust, Scenario::noemotions, Scenario::emotionaltrust}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view to_string(MeetingRule r) {
  return r == MeetingRule::colocated ? "colocated" : "encounter";
}

std::optional<MeetingRule> parse_meeting_rule(std::string_view name) {
  if (name == "colocated") return MeetingRule::colocated;
  if (name == "encounter") return MeetingRule::encounter;
  return std::nullopt;
}

std::string_view to_string(BusyRule r) { return r == BusyRule::carrying ? "carrying" : "delegable"; }

std::optional<BusyRule> parse_busy_rule(std::string_view name) {
  if (name == "carrying") return BusyRule::carrying;
  if (name == "delegable") return BusyRule::delegable;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// SimConfig

void SimConfig::validate() const {
  if (grid_size < 1) reject("grid_size", grid_size, "integer >= 1");
  if (n_packages < 0) reject("n_packages", n_packages, "integer >= 0");
  if (n_agents < 1) reject("n_agents", n_agents, "integer >= 1");
  if (!in_unit(idle_fraction)) reject("idle_fraction", idle_fraction, "[0, 1]");
  if (n_packages > 0 && idle_agent_count() >= n_agents) {
    reject("idle_fraction", idle_fraction, "[0, 1) with at least one busy agent when n_packages > 0");
  }
  if (!in_unit(privacy_prob)) reject("privacy_prob", privacy_prob, "[0, 1]");
  if (!in_unit(p_neurotic)) reject("p_neurotic", p_neurotic, "[0, 1]");
  if (!in_unit(p_psychotic)) reject("p_psychotic", p_psychotic, "[0, 1]");
  if (p_neurotic + p_psychotic > 1.0 + 1e-12) {
    reject("p_psychotic", p_psychotic, "[0, 1 - p_neurotic]");
  }
  if (!(privacy_penalty >= 0.0)) reject("privacy_penalty", privacy_penalty, ">= 0");
  if (!(ontime_reward >= 0.0)) reject("ontime_reward", ontime_reward, ">= 0");
  if (!(delay_penalty >= 0.0)) reject("delay_penalty", delay_penalty, ">= 0");
  if (!in_unit(base_threshold)) reject("base_threshold", base_threshold, "[0, 1]");
  if (!in_unit(initial_trust)) reject("initial_trust", initial_trust, "[0, 1]");
  if (!(deadline_slack >= 1.0)) reject("deadline_slack", deadline_slack, ">= 1");
  if (cycle_cap < 1) reject("cycle_cap", cycle_cap, "integer >= 1");
  if (!(affect.delta_e > 0.0)) reject("delta_e", affect.delta_e, "(0, phi_e)");
  if (!(affect.phi_e > affect.delta_e)) reject("phi_e", affect.phi_e, "(delta_e, inf)");
  if (!(affect.v_p > 0.0 && affect.v_p <= 1.0)) reject("v_p", affect.v_p, "(0, 1]");
  if (!(affect.v_a > 0.0 && affect.v_a <= 1.0)) reject("v_a", affect.v_a, "(0, 1]");
  if (!(affect.v_d > 0.0 && affect.v_d <= 1.0)) reject("v_d", affect.v_d, "(0, 1]");
}

int SimConfig::idle_agent_count() const {
  return static_cast<int>(std::floor(idle_fraction * n_agents + 1e-9));
}

// ---------------------------------------------------------------------------
// RewardLedger

RewardLedger::RewardLedger(int n_agents)
    : totals_(static_cast<std::size_t>(n_agents), 0.0),
      completions_(static_cast<std::size_t>(n_agents), 0) {}

void RewardLedger::credit(int cycle, AgentId agent, double amount, Kind kind) {
  entries_.push_back({cycle, agent, amount, kind});
  totals_.at(static_cast<std::size_t>(agent)) += amount;
}

void RewardLedger::add_completion(AgentId agent) { ++completions_.at(static_cast<std::size_t>(agent)); }

double RewardLedger::total() const { return std::accumulate(totals_.begin(), totals_.end(), 0.0); }

std::optional<double> RewardLedger::reward_per_task(AgentId agent) const {
  const int n = completions(agent);
  if (n == 0) return std::nullopt;
  return agent_total(agent) / n;
}

std::optional<double> RewardLedger::mean_reward_per_task() const {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < totals_.size(); ++i) {
    if (completions_[i] == 0) continue;
    sum += totals_[i] / completions_[i];
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

// ---------------------------------------------------------------------------
// Emotion-source and dominance rules

affect::SourceVector source_vector(const MeetingObservations& seen) {
  return {seen.angry_peers > 0, seen.own_disclosure, seen.alien_privacy};
}

double task_count_dominance(int count) {
  if (count <= 0) return 0.1;
  if (count == 1) return 0.05;
  return -0.05 * (count - 1);
}

std::vector<double> dominance_events(const DominanceInputs& in) {
  std::vector<double> out;
  for (int i = 0; i < in.angry_peers_met; ++i) out.push_back(kAngerDominance);
  if (in.task_count != in.previous_task_count) out.push_back(task_count_dominance(in.task_count));
  if (in.completed_task && in.reward_per_task && in.population_mean) {
    const double diff = *in.reward_per_task - *in.population_mean;
    if (diff > kRewardTieTolerance) out.push_back(kPerformanceDominance);
    if (diff < -kRewardTieTolerance) out.push_back(-kPerformanceDominance);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulation

Simulation::Simulation(SimConfig config, bool record_log)
    : config_(validated(std::move(config))),
      rng_(config_.seed),
      world_(world::Grid{config_.grid_size}),
      ledger_(config_.n_agents),
      log_(record_log) {
  initialize();
}

void Simulation::initialize() {
  const int size = config_.grid_size;
  for (int i = 0; i < config_.n_agents; ++i) {
    const Cell pos{rng_.below(size), rng_.below(size)};
    const double u = rng_.uniform();
    auto personality = affect::Personality::extroverted;
    if (u < config_.p_neurotic) {
      personality = affect::Personality::neurotic;
    } else if (u < config_.p_neurotic + config_.p_psychotic) {
      personality = affect::Personality::psychotic;
    }
    const AgentId id = world_.add_agent(pos, personality);
    carriers_.push_back(Carrier{agent::Agent{id},
                                trust::TrustStore{config_.initial_trust, config_.base_threshold},
                                {}, {}, 0});
    json e{{"cycle", 0}, {"kind", "agent"}, {"agent", id}, {"personality", affect::to_string(personality)},
           {"position", cell_json(pos)}};
    log_.append(e.dump());
  }

  // Partial Fisher-Yates: the first `idle` slots hold the idle agents.
  std::vector<AgentId> order(static_cast<std::size_t>(config_.n_agents));
  std::iota(order.begin(), order.end(), 0);
  const int idle = config_.idle_agent_count();
  for (int i = 0; i < idle; ++i) {
    const int j = i + rng_.below(config_.n_agents - i);
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  std::vector<AgentId> busy(order.begin() + idle, order.end());
  std::sort(busy.begin(), busy.end());

  for (int p = 0; p < config_.n_packages; ++p) {
    const Cell dest{rng_.below(size), rng_.below(size)};
    const auto slot = static_cast<std::size_t>(p) < busy.size()
                          ? static_cast<std::size_t>(p)
                          : static_cast<std::size_t>(rng_.below(static_cast<int>(busy.size())));
    const AgentId owner = busy[slot];
    const int deadline = world::deadline_for(world_.body(owner).position, dest, 0, config_.deadline_slack);
    const PackageId id = world_.add_package(owner, dest, 0, deadline);
    world_.assign_package(id, owner, 0, config_.privacy_prob, rng_);
    json e{{"cycle", 0}, {"kind", "assign"}, {"package", id}, {"agent", owner},
           {"destination", cell_json(dest)}, {"deadline", deadline},
           {"private", world_.package(id).is_private_for(owner)}};
    log_.append(e.dump());
  }

  if (config_.check_invariants) check_invariants();
}

bool Simulation::finished() const {
  return world_.all_delivered() || cycle_ >= config_.cycle_cap;
}

affect::MoodLabel Simulation::visible_mood(AgentId agent) const {
  if (config_.scenario == Scenario::noemotions) return affect::MoodLabel::neutral;
  return affect::mood(carriers_[static_cast<std::size_t>(agent)].pad, config_.affect).label;
}

void Simulation::step() {
  ++cycle_;
  std::vector<CycleNotes> notes(carriers_.size());

  perceive();
  deliberate_and_move();
  run_meetings(notes);
  settle_deliveries(notes);
  update_affect(notes);
  log_pad_states();

  if (config_.check_invariants) check_invariants();
}

void Simulation::perceive() {
  const std::size_t threshold = config_.busy_rule == BusyRule::delegable ? 2 : 1;
  for (auto& c : carriers_) c.mind.perceive(world_, threshold);
}

void Simulation::deliberate_and_move() {
  for (auto& c : carriers_) {
    const auto before = c.mind.desire();
    const auto intent = c.mind.deliberate(world_);
    if (c.mind.desire() != before) {
      json e{{"cycle", cycle_}, {"kind", "desire"}, {"agent", c.mind.id()},
             {"from", agent::to_string(before)}, {"to", agent::to_string(c.mind.desire())}};
      if (c.mind.beliefs().current) e["current"] = *c.mind.beliefs().current;
      log_.append(e.dump());
    }
    if (intent.target) world::step_toward(world_.body(c.mind.id()), *intent.target, world_.grid(), intent.serving);
  }
}

void Simulation::run_meetings(std::vector<CycleNotes>& notes) {
  // Moods are read once: everything exchanged this cycle reflects the state
  // at the end of the previous one.
  std::vector<affect::MoodLabel> moods;
  moods.reserve(carriers_.size());
  for (const auto& c : carriers_) moods.push_back(visible_mood(c.mind.id()));

  std::set<std::pair<AgentId, AgentId>> together;
  for (const auto& group : world::detect_meetings(world_.bodies())) {
    for (const auto& pair : group.pairs()) {
      together.insert(pair);
      if (config_.meeting_rule == MeetingRule::encounter && together_.contains(pair)) continue;
      meet(pair.first, pair.second, notes, moods);
    }
  }
  together_ = std::move(together);
}

void Simulation::meet(AgentId a, AgentId b, std::vector<CycleNotes>& notes,
                      const std::vector<affect::MoodLabel>& moods) {
  ++meetings_;
  const Cell where = world_.body(a).position;
  if (log_.enabled()) log_.append(json{{"cycle", cycle_}, {"kind", "meeting"}, {"agents", json::array({a, b})},
                   {"cell", cell_json(where)}}
                  .dump());

  const auto carries_private_box = [&](AgentId x) {
    const auto& body = world_.body(x);
    return std::any_of(body.carried.begin(), body.carried.end(),
                       [&](PackageId p) { return world_.package(p).is_private_for(x); });
  };

  const std::pair<AgentId, AgentId> sides[2] = {{a, b}, {b, a}};
  for (const auto& [self, peer] : sides) {
    const bool private_cell = rng_.bernoulli(config_.privacy_prob);
    const bool private_box = carries_private_box(self);
    auto& mine = notes[static_cast<std::size_t>(self)];
    if (private_cell || private_box) {
      ++disclosures_;
      mine.seen.own_disclosure = true;
      mine.pleasure.push_back({affect::Dimension::pleasure, -kPleasureStep});
      ledger_.credit(cycle_, self, -config_.privacy_penalty, RewardLedger::Kind::disclosure);
      if (log_.enabled()) log_.append(json{{"cycle", cycle_}, {"kind", "disclosure"}, {"agent", self}, {"peer", peer},
                       {"cell", private_cell}, {"box", private_box},
                       {"reward", -config_.privacy_penalty}}
                      .dump());
    }
  }
  for (const auto& [self, peer] : sides) {
    auto& mine = notes[static_cast<std::size_t>(self)];
    if (moods[static_cast<std::size_t>(peer)] == affect::MoodLabel::angry) ++mine.seen.angry_peers;
    if (carries_private_box(peer)) mine.seen.alien_privacy = true;
  }

  if (config_.scenario == Scenario::notrust) return;
  // Lower id gets the first chance to initiate; at most one CFP per pair.
  if (!try_delegation(a, b, moods)) try_delegation(b, a, moods);
}

bool Simulation::request_gate(AgentId initiator, AgentId responder, PackageId pkg,
                              const std::vector<affect::MoodLabel>& moods) {
  const auto& c = carriers_[static_cast<std::size_t>(initiator)];
  trust::DecisionContext ctx;
  ctx.mood = moods[static_cast<std::size_t>(initiator)];
  ctx.own_privacy_involved = world_.package(pkg).is_private_for(initiator);
  ctx.load = static_cast<int>(world_.body(initiator).carried.size());
  const double required = trust::required_trust_to_request(ctx, c.trust.base_threshold());
  const double trust_value = c.trust.trust_in(responder);
  const bool outcome = trust::decide(trust_value, required);
  log_trust_decision("request", initiator, responder, pkg, trust_value, ctx, required, outcome);
  return outcome;
}

bool Simulation::try_delegation(AgentId initiator, AgentId responder,
                                const std::vector<affect::MoodLabel>& moods) {
  auto& from = carriers_[static_cast<std::size_t>(initiator)];
  const auto candidate = from.mind.delegation_candidate(world_);
  if (!candidate) return false;
  if (net_.is_back_delegation(*candidate, initiator, responder)) return false;
  if (!request_gate(initiator, responder, *candidate, moods)) return false;

  auto opened = net_.initiate_cfp(initiator, responder, world_.package(*candidate), cycle_);
  log_message(opened.cfp);

  auto& to = carriers_[static_cast<std::size_t>(responder)];
  trust::DecisionContext ctx;
  ctx.mood = moods[static_cast<std::size_t>(responder)];
  ctx.own_privacy_involved =
      world::sample_privacy(world_.package(*candidate), responder, config_.privacy_prob, rng_);
  ctx.load = static_cast<int>(world_.body(responder).carried.size());
  const double required = trust::required_trust_to_accept(ctx, to.trust.base_threshold());
  const double trust_value = to.trust.trust_in(initiator);
  const bool accept = trust::decide(trust_value, required);
  log_trust_decision("accept", responder, initiator, *candidate, trust_value, ctx, required, accept);

  log_message(net_.respond(opened.id, accept, cycle_));
  if (accept) {
    auto [msg, handoff] = net_.conclude(opened.id, cycle_);
    log_message(msg);
    world_.assign_package(handoff.package, handoff.to, cycle_, config_.privacy_prob, rng_);
    from.mind.on_handed_off(handoff.package);
    if (log_.enabled()) log_.append(json{{"cycle", cycle_}, {"kind", "handoff"}, {"package", handoff.package},
                     {"from", handoff.from}, {"to", handoff.to},
                     {"private", world_.package(handoff.package).is_private_for(handoff.to)}}
                    .dump());
  }
  return true;
}

void Simulation::settle_deliveries(std::vector<CycleNotes>& notes) {
  for (const auto& d : world_.deliver_arrived(cycle_)) {
    const auto& pkg = world_.package(d.package);
    const int delay = std::max(0, cycle_ - pkg.deadline_cycle);
    const bool on_time = delay == 0;
    const auto* chain = net_.chain(d.package);
    const std::vector<AgentId> members = chain ? chain->members() : std::vector<AgentId>{pkg.owner};

    (on_time ? on_time_ : late_) += 1;
    (on_time ? on_time_credits_ : late_credits_) += static_cast<int>(members.size());
    const double amount = on_time ? config_.ontime_reward : -config_.delay_penalty;
    for (AgentId m : members) {
      ledger_.credit(cycle_, m, amount, on_time ? RewardLedger::Kind::on_time : RewardLedger::Kind::late);
      ledger_.add_completion(m);
      auto& mine = notes[static_cast<std::size_t>(m)];
      mine.completed = true;
      mine.pleasure.push_back({affect::Dimension::pleasure, on_time ? kPleasureStep : -kPleasureStep});
    }
    if (log_.enabled()) log_.append(json{{"cycle", cycle_}, {"kind", "delivery"}, {"package", d.package},
                     {"carrier", d.carrier}, {"deadline", pkg.deadline_cycle}, {"delay", delay},
                     {"chain", members}, {"reward_each", amount}}
                    .dump());

    if (chain) {
      for (const auto& link : chain->links) {
        auto& store = carriers_[static_cast<std::size_t>(link.delegator)].trust;
        store.update_on_outcome(link.delegatee, delay);
        if (log_.enabled()) log_.append(json{{"cycle", cycle_}, {"kind", "trust_update"}, {"agent", link.delegator},
                         {"peer", link.delegatee}, {"delay", delay},
                         {"trust", store.trust_in(link.delegatee)}}
                        .dump());
      }
    }
    for (const auto& m : net_.settle(pkg, delay, cycle_)) log_message(m);
    carriers_[static_cast<std::size_t>(d.carrier)].mind.on_delivered(d.package, world_);
  }
}

void Simulation::update_affect(const std::vector<CycleNotes>& notes) {
  const auto mean = ledger_.mean_reward_per_task();
  for (auto& c : carriers_) {
    const AgentId id = c.mind.id();
    const auto& mine = notes[static_cast<std::size_t>(id)];
    const int task_count = static_cast<int>(world_.body(id).carried.size());

    if (config_.scenario != Scenario::noemotions) {
      const auto sources = source_vector(mine.seen);
      DominanceInputs in;
      in.angry_peers_met = mine.seen.angry_peers;
      in.previous_task_count = c.previous_task_count;
      in.task_count = task_count;
      in.completed_task = mine.completed;
      in.reward_per_task = ledger_.reward_per_task(id);
      in.population_mean = mean;

      std::vector<affect::EventDelta> deltas = mine.pleasure;
      for (double d : dominance_events(in)) deltas.push_back({affect::Dimension::dominance, d});

      const auto personality = world_.body(id).personality;
      // Decays read the arousal of the previous cycle.
      const auto after_events = affect::apply_event_deltas(c.pad, deltas);
      auto next = affect::update_arousal(after_events, c.previous_sources, sources, config_.affect);
      next.pleasure = affect::decay_pleasure(after_events, personality, config_.affect).pleasure;
      next.dominance = affect::decay_dominance(after_events, personality, config_.affect).dominance;
      c.pad = next;
      c.previous_sources = sources;
    }
    c.previous_task_count = task_count;
  }
}

void Simulation::log_pad_states() {
  if (!log_.enabled() || config_.scenario == Scenario::noemotions) return;
  for (const auto& c : carriers_) {
    const auto m = affect::mood(c.pad, config_.affect);
    if (log_.enabled()) log_.append(json{{"cycle", cycle_}, {"kind", "pad"}, {"agent", c.mind.id()},
                     {"pad", json::array({c.pad.pleasure, c.pad.arousal, c.pad.dominance})},
                     {"mood", affect::to_string(m.label)}, {"intensity", m.intensity}}
                    .dump());
  }
}

void Simulation::log_message(const protocol::Message& m) {
  if (!log_.enabled()) return;
  auto j = json::parse(message_json(m));
  json e{{"cycle", m.cycle}, {"kind", "message"}};
  for (auto& [k, v] : j.items()) {
    if (k != "cycle") e[k] = v;
  }
  log_.append(e.dump());
}

void Simulation::log_trust_decision(std::string_view role, AgentId decider, AgentId peer,
                                    PackageId pkg, double trust_value,
                                    const trust::DecisionContext& ctx, double required,
                                    bool outcome) {
  ++trust_decisions_;
  const double modifier = trust::mood_modifier(ctx.mood);
  if (modifier != 0.0) ++nonzero_mood_modifiers_;
  if (!log_.enabled()) return;
  log_.append(json{{"cycle", cycle_}, {"kind", "trust_decision"}, {"role", role},
                   {"agent", decider}, {"peer", peer}, {"package", pkg}, {"trust", trust_value},
                   {"mood", affect::to_string(ctx.mood)}, {"mood_modifier", modifier},
                   {"own_privacy", ctx.own_privacy_involved}, {"load", ctx.load},
                   {"required", required}, {"outcome", outcome}}
                  .dump());
}

void Simulation::check_invariants() const {
  world_.check_conservation();
  for (const auto& c : carriers_) {
    const auto& pad = c.pad;
    if (pad.pleasure < -1.0 || pad.pleasure > 1.0 || pad.dominance < -1.0 || pad.dominance > 1.0 ||
        pad.arousal < 0.0 || pad.arousal > 1.0) {
      throw world::InvariantViolation("PAD out of range for agent " + std::to_string(c.mind.id()));
    }
    for (const auto& [peer, value] : c.trust.entries()) {
      if (value < 0.0 || value > 1.0) {
        throw world::InvariantViolation("trust out of range for agent " + std::to_string(c.mind.id()));
      }
    }
    c.mind.check_invariants(world_);
  }
  for (const auto& [pkg, chain] : net_.chains()) {
    if (!chain.is_linked()) throw world::InvariantViolation("broken delegation chain for package " + std::to_string(pkg));
    const auto& p = world_.package(pkg);
    if (!p.delivered() && !chain.links.empty() && p.carrier != chain.links.back().delegatee) {
      throw world::InvariantViolation("chain tail disagrees with carrier of package " + std::to_string(pkg));
    }
  }
  if (world_.all_delivered() && !net_.all_terminal()) {
    throw world::InvariantViolation("open conversation after every package was delivered");
  }
}

RunResult Simulation::run() {
  while (!finished()) step();

  RunResult r;
  r.total_reward = ledger_.total();
  r.cycles = cycle_;
  r.terminated = world_.all_delivered();
  r.delivered = on_time_ + late_;
  r.on_time = on_time_;
  r.late = late_;
  r.on_time_credits = on_time_credits_;
  r.late_credits = late_credits_;
  r.disclosures = disclosures_;
  r.meetings = meetings_;
  for (const auto& conv : net_.conversations()) {
    ++r.cfp_sent;
    if (conv.state == protocol::ConversationState::refused) ++r.cfp_refused;
    if (conv.state == protocol::ConversationState::accepted ||
        conv.state == protocol::ConversationState::done ||
        conv.state == protocol::ConversationState::failed) {
      ++r.cfp_accepted;
    }
  }
  r.trust_decisions = trust_decisions_;
  r.nonzero_mood_modifiers = nonzero_mood_modifiers_;
  r.agent_rewards = ledger_.agent_totals();
  r.messages = net_.messages();

  if (log_.enabled()) log_.append(json{{"cycle", cycle_}, {"kind", "end"}, {"terminated", r.terminated},
                   {"total_reward", r.total_reward}, {"on_time", r.on_time}, {"late", r.late},
                   {"disclosures", r.disclosures}, {"cfp_sent", r.cfp_sent}}
                  .dump());
  r.log = log_;
  return r;
}

RunResult run(const SimConfig& config, bool record_log) {
  Simulation sim(config, record_log);
  return sim.run();
}

}  // namespace emotrust
