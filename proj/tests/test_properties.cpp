// Randomized checks of the model invariants. Generators are seeded, so a
// failure reproduces; the seed and case index appear in the failure context.

#include <map>
#include <random>

#include "doctest.h"
#include "emotrust/affect.hpp"
#include "emotrust/engine.hpp"
#include "emotrust/protocol.hpp"
#include "emotrust/trust.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace emotrust;
using json = nlohmann::json;

namespace {

constexpr int kCases = 500;

affect::PadState to_pad(const oracle::Pad& p) {
  return {static_cast<double>(p.p), static_cast<double>(p.a), static_cast<double>(p.d)};
}

bool in_bounds(const affect::PadState& p) {
  return p.pleasure >= -1 && p.pleasure <= 1 && p.arousal >= 0 && p.arousal <= 1 && p.dominance >= -1 &&
         p.dominance <= 1;
}

affect::Personality any_personality(oracle::Sampler& g) {
  return static_cast<affect::Personality>(g.integer(0, 2));
}

affect::SourceVector any_sources(oracle::Sampler& g) { return {g.coin(), g.coin(), g.coin()}; }

SimConfig any_config(std::mt19937_64& gen) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); };
  auto unit = [&] { return std::uniform_real_distribution<double>(0.0, 1.0)(gen); };
  SimConfig c;
  c.grid_size = pick(3, 30);
  c.n_agents = pick(1, 20);
  c.n_packages = pick(0, 25);
  c.idle_fraction = pick(0, 4) * 0.2;
  if (c.n_packages > 0 && c.idle_agent_count() >= c.n_agents) c.idle_fraction = 0.0;
  c.privacy_prob = unit();
  c.p_neurotic = unit() * 0.5;
  c.p_psychotic = unit() * 0.5;
  c.scenario = static_cast<Scenario>(pick(0, 2));
  c.meeting_rule = static_cast<MeetingRule>(pick(0, 1));
  c.busy_rule = static_cast<BusyRule>(pick(0, 1));
  c.affect.decay_toward_zero = pick(0, 1) == 1;
  c.initial_trust = unit();
  c.base_threshold = unit();
  c.cycle_cap = 3000;
  c.seed = gen();
  c.check_invariants = true;
  return c;
}

}  // namespace

TEST_CASE("affect operations stay inside the PAD box") {
  oracle::Sampler g(101);
  const affect::AffectParams params;
  for (int i = 0; i < kCases; ++i) {
    CAPTURE(i);
    auto pad = to_pad(g.pad());
    std::vector<affect::EventDelta> deltas;
    for (int k = g.integer(0, 6); k > 0; --k) {
      deltas.push_back({g.coin() ? affect::Dimension::pleasure : affect::Dimension::dominance,
                        static_cast<double>(g.uniform(-0.5L, 0.5L))});
    }
    const auto p = any_personality(g);
    pad = affect::apply_event_deltas(pad, deltas);
    CHECK(in_bounds(pad));
    pad = affect::update_arousal(pad, any_sources(g), any_sources(g), params);
    CHECK(in_bounds(pad));
    const auto decayed = affect::decay_dominance(affect::decay_pleasure(pad, p, params), p, params);
    CHECK(in_bounds(decayed));
    CHECK(decayed.pleasure <= pad.pleasure);
    CHECK(decayed.dominance <= pad.dominance);
    const auto m = affect::mood(decayed, params);
    CHECK(m.intensity >= 0.0);
    CHECK(m.intensity <= 1.0);
    CHECK((m.label == affect::MoodLabel::neutral) == (m.intensity == 0.0));
  }
}

TEST_CASE("decay toward zero never flips the sign") {
  oracle::Sampler g(202);
  affect::AffectParams params;
  params.decay_toward_zero = true;
  for (int i = 0; i < kCases; ++i) {
    const auto pad = to_pad(g.pad());
    const auto p = any_personality(g);
    const auto out = affect::decay_dominance(affect::decay_pleasure(pad, p, params), p, params);
    CHECK(out.pleasure * pad.pleasure >= 0.0);
    CHECK(out.dominance * pad.dominance >= 0.0);
    CHECK(std::abs(out.pleasure) <= std::abs(pad.pleasure));
  }
}

TEST_CASE("trust stays in the unit interval") {
  std::mt19937_64 gen(303);
  std::uniform_int_distribution<int> delay(0, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    trust::TrustStore store(unit(gen), unit(gen));
    for (int k = 0; k < 50; ++k) {
      const int peer = delay(gen);
      store.update_on_outcome(peer, delay(gen) < 3 ? 0 : delay(gen));
      CHECK(store.trust_in(peer) >= 0.0);
      CHECK(store.trust_in(peer) <= 1.0);
    }
    trust::DecisionContext ctx{static_cast<affect::MoodLabel>(delay(gen) % 6), delay(gen) % 2 == 0, delay(gen)};
    for (double req : {trust::required_trust_to_request(ctx, store.base_threshold()),
                       trust::required_trust_to_accept(ctx, store.base_threshold())}) {
      CHECK(req >= 0.0);
      CHECK(req <= 1.0);
    }
  }
}

TEST_CASE("random performative walks conform exactly when every step is legal") {
  std::mt19937_64 gen(404);
  std::uniform_int_distribution<int> pick(0, 6);
  std::uniform_int_distribution<int> length(1, 5);
  for (int i = 0; i < kCases; ++i) {
    std::vector<protocol::Performative> seq;
    for (int n = length(gen); n > 0; --n) seq.push_back(static_cast<protocol::Performative>(pick(gen)));
    bool legal = true;
    std::optional<protocol::ConversationState> state;
    for (auto p : seq) {
      auto next = protocol::next_state(state, p);
      if (!next) {
        legal = false;
        break;
      }
      if (state) CHECK(protocol::is_legal_transition(*state, *next));
      state = next;
    }
    CHECK(protocol::conforms(seq) == legal);
  }
}

TEST_CASE("random simulations keep their books") {
  std::mt19937_64 gen(505);
  for (int i = 0; i < 60; ++i) {
    const auto c = any_config(gen);
    CAPTURE(i);
    CAPTURE(c.seed);
    RunResult r;
    REQUIRE_NOTHROW(r = run(c, true));

    // Reward accounting reconstructs the total.
    const double expected = r.on_time_credits * c.ontime_reward - r.late_credits * c.delay_penalty -
                            r.disclosures * c.privacy_penalty;
    CHECK(r.total_reward == doctest::Approx(expected));
    double sum = 0.0;
    for (double v : r.agent_rewards) sum += v;
    CHECK(sum == doctest::Approx(r.total_reward));

    // Per-conversation traces follow the legal graph.
    std::map<ConversationId, std::vector<protocol::Performative>> traces;
    for (const auto& m : r.messages) traces[m.conversation].push_back(m.performative);
    for (const auto& [id, seq] : traces) CHECK(protocol::conforms(seq));
    if (c.scenario == Scenario::notrust) CHECK(r.messages.empty());

    // The delivering agent is the last carrier in the chain.
    std::map<int, int> handoffs;
    for (const auto& line : r.log.lines()) {
      const auto e = json::parse(line);
      if (e["kind"] == "handoff") ++handoffs[e["package"].get<int>()];
      if (e["kind"] == "delivery") {
        const auto chain = e["chain"].get<std::vector<int>>();
        CHECK(static_cast<int>(chain.size()) <= handoffs[e["package"].get<int>()] + 1);
      }
      if (e["kind"] == "trust_decision" && c.scenario == Scenario::noemotions) {
        CHECK(e["mood_modifier"].get<double>() == 0.0);
      }
    }
    if (r.terminated) CHECK(r.delivered == c.n_packages);
  }
}

TEST_CASE("stepwise invariants hold for a full default sweep slice") {
  for (auto s : {Scenario::notrust, Scenario::noemotions, Scenario::emotionaltrust}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      SimConfig c;
      c.scenario = s;
      c.seed = seed;
      c.check_invariants = true;
      Simulation sim(c, false);
      while (!sim.finished()) {
        sim.step();
        for (const auto& carrier : sim.carriers()) {
          for (const auto& [from, to] : carrier.mind.transitions()) CHECK(from != to);
        }
      }
      const auto& net = sim.contract_net();
      CHECK(net.all_terminal());
      for (const auto& [pkg, chain] : net.chains()) {
        CHECK(chain.is_linked());
        CHECK(chain.owner == sim.world().package(pkg).owner);
      }
    }
  }
}
