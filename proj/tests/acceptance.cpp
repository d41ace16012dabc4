// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Tolerances and sample sizes are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "emotrust/affect.hpp"
#include "emotrust/engine.hpp"
#include "emotrust/experiment.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace emotrust;
using namespace emotrust::harness;

namespace {

constexpr double kOracleTolerance = 1e-9;
constexpr int kOracleCases = 1000;
constexpr int kReplications = 100;
constexpr int kSeededRuns = 100;
constexpr double kPrivacyCorrelationCeiling = -0.8;
constexpr int kCycleCap = 2000;

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double mean_of(const std::vector<SummaryCell>& cells, Scenario s, double v) {
  const auto* c = find_cell(cells, s, v);
  return c ? c->mean : std::nan("");
}

std::string csv_of(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_rows_csv(os, rows);
  return os.str();
}

const std::vector<Scenario> kScenarios{Scenario::notrust, Scenario::noemotions, Scenario::emotionaltrust};

void idle_ordering(const std::vector<SummaryCell>& cells) {
  bool ok = true;
  std::string detail;
  for (double v : {0.2, 0.4, 0.6, 0.8}) {
    const double none = mean_of(cells, Scenario::notrust, v);
    const double flat = mean_of(cells, Scenario::noemotions, v);
    const double full = mean_of(cells, Scenario::emotionaltrust, v);
    ok = ok && none < flat && none < full;
    detail += "idle " + fmt(v, 1) + ": " + fmt(none) + " < {" + fmt(flat) + ", " + fmt(full) + "}; ";
  }
  report("idle-ordering", ok, detail);
}

void saturation(const std::vector<SummaryCell>& cells) {
  const double low = mean_of(cells, Scenario::emotionaltrust, 0.0);
  const double mid = mean_of(cells, Scenario::emotionaltrust, 0.4);
  const double high = mean_of(cells, Scenario::emotionaltrust, 0.8);
  const double early = mid - low;
  const double late = high - mid;
  report("idle-saturation", late < early,
         "gain 0.4->0.8 = " + fmt(late) + ", gain 0.0->0.4 = " + fmt(early));
}

void privacy_trend() {
  ExperimentSpec spec;
  spec.sweep = SweepVariable::privacy_prob;
  spec.replications = kReplications;
  const auto cells = summarize(run_experiment(spec));
  bool ok = true;
  std::string detail;
  for (auto s : kScenarios) {
    std::vector<double> means;
    for (double v : spec.values) means.push_back(mean_of(cells, s, v));
    const double rho = spearman(spec.values, means);
    ok = ok && rho <= kPrivacyCorrelationCeiling;
    detail += std::string(to_string(s)) + " rho=" + fmt(rho, 3) + "; ";
  }
  report("privacy-trend", ok, detail);
}

void oracle_suite() {
  oracle::Sampler g(20240601);
  const affect::AffectParams params;
  const long double inner = params.delta_e, outer = params.phi_e;
  double worst[4] = {0, 0, 0, 0};
  int label_mismatch = 0;

  for (int i = 0; i < kOracleCases; ++i) {
    // Intensity and mood.
    const auto x = g.pad();
    const affect::PadState pad{static_cast<double>(x.p), static_cast<double>(x.a), static_cast<double>(x.d)};
    for (int e = 0; e < 5; ++e) {
      const double got = affect::emotion_intensity(pad, affect::kAnchors[static_cast<std::size_t>(e)], params);
      worst[0] = std::max(worst[0], static_cast<double>(std::fabs(got - oracle::intensity(x, e, inner, outer))));
    }
    long double strength = 0;
    const int label = oracle::mood(x, inner, outer, &strength);
    const auto m = affect::mood(pad, params);
    if (static_cast<int>(m.label) != label && std::fabs(m.intensity - strength) > kOracleTolerance) ++label_mismatch;

    // Pleasure decay.
    const int personality = g.integer(0, 2);
    const auto p = static_cast<affect::Personality>(personality);
    const double pl = affect::decay_pleasure(pad, p, params).pleasure;
    worst[1] = std::max(worst[1], static_cast<double>(std::fabs(
                                      pl - oracle::pleasure_after_decay(pad.pleasure, pad.arousal, personality, params.v_p))));

    // Arousal update.
    std::array<int, 3> prev{g.integer(0, 1), g.integer(0, 1), g.integer(0, 1)};
    std::array<int, 3> curr{g.integer(0, 1), g.integer(0, 1), g.integer(0, 1)};
    const affect::SourceVector sp{prev[0] == 1, prev[1] == 1, prev[2] == 1};
    const affect::SourceVector sc{curr[0] == 1, curr[1] == 1, curr[2] == 1};
    const double ar = affect::update_arousal(pad, sp, sc, params).arousal;
    worst[2] = std::max(worst[2], static_cast<double>(std::fabs(ar - oracle::arousal_after(pad.arousal, prev, curr, params.v_a))));

    // Dominance decay.
    const double dm = affect::decay_dominance(pad, p, params).dominance;
    worst[3] = std::max(worst[3], static_cast<double>(std::fabs(
                                      dm - oracle::dominance_after_decay(pad.dominance, pad.arousal, personality, params.v_d))));
  }
  const char* names[4] = {"oracle-intensity", "oracle-pleasure-decay", "oracle-arousal", "oracle-dominance-decay"};
  for (int k = 0; k < 4; ++k) {
    std::string detail = std::to_string(kOracleCases) + " cases, max |error| = " + fmt(worst[k], 17);
    bool ok = worst[k] <= kOracleTolerance;
    if (k == 0) {
      detail += ", mood label mismatches = " + std::to_string(label_mismatch);
      ok = ok && label_mismatch == 0;
    }
    report(names[k], ok, detail);
  }
}

void invariant_suite() {
  int violations = 0;
  std::string first;
  for (auto s : kScenarios) {
    for (int seed = 1; seed <= kSeededRuns; ++seed) {
      SimConfig c;
      c.scenario = s;
      c.seed = static_cast<std::uint64_t>(seed);
      c.check_invariants = true;
      try {
        const auto r = run(c, false);
        std::map<ConversationId, std::vector<protocol::Performative>> traces;
        for (const auto& m : r.messages) traces[m.conversation].push_back(m.performative);
        for (const auto& [id, seq] : traces) {
          if (!protocol::conforms(seq)) throw world::InvariantViolation("non-conforming conversation");
        }
      } catch (const std::exception& e) {
        if (violations++ == 0) first = std::string(to_string(s)) + " seed " + std::to_string(seed) + ": " + e.what();
      }
    }
  }
  report("invariants", violations == 0,
         std::to_string(3 * kSeededRuns) + " runs, violations = " + std::to_string(violations) +
             (first.empty() ? "" : " (" + first + ")"));
}

void determinism(const std::vector<ResultRow>& idle_rows, const ExperimentSpec& idle_spec) {
  int log_mismatch = 0;
  for (auto s : kScenarios) {
    for (int seed = 1; seed <= 20; ++seed) {
      SimConfig c;
      c.scenario = s;
      c.seed = static_cast<std::uint64_t>(seed);
      if (run(c, true).log.to_jsonl() != run(c, true).log.to_jsonl()) ++log_mismatch;
    }
  }
  report("determinism-log", log_mismatch == 0, "60 repeated runs, mismatches = " + std::to_string(log_mismatch));

  const auto again = run_experiment(idle_spec, 1);
  const auto a = csv_of(idle_rows);
  const auto b = csv_of(again);
  report("determinism-csv", idle_rows.size() == 1500 && a == b,
         std::to_string(idle_rows.size()) + " rows, " + std::to_string(a.size()) + " bytes, identical = " +
             (a == b ? "yes" : "no"));
}

void scenario_contracts() {
  int notrust_messages = 0;
  int noemotions_nonzero = 0;
  int decisions = 0;
  for (int seed = 1; seed <= kSeededRuns; ++seed) {
    SimConfig c;
    c.seed = static_cast<std::uint64_t>(seed);
    c.scenario = Scenario::notrust;
    const auto none = run(c, true);
    notrust_messages += static_cast<int>(none.messages.size());
    for (const auto& line : none.log.lines()) {
      if (nlohmann::json::parse(line)["kind"] == "message") ++notrust_messages;
    }

    c.scenario = Scenario::noemotions;
    const auto flat = run(c, true);
    for (const auto& line : flat.log.lines()) {
      const auto e = nlohmann::json::parse(line);
      if (e["kind"] != "trust_decision") continue;
      ++decisions;
      if (e["mood_modifier"].get<double>() != 0.0) ++noemotions_nonzero;
    }
  }
  report("scenario-notrust", notrust_messages == 0,
         std::to_string(kSeededRuns) + " runs, protocol messages = " + std::to_string(notrust_messages));
  report("scenario-noemotions", noemotions_nonzero == 0,
         std::to_string(decisions) + " logged trust decisions, nonzero mood modifiers = " +
             std::to_string(noemotions_nonzero));
}

void termination() {
  int unfinished = 0;
  int longest = 0;
  for (int seed = 1; seed <= kSeededRuns; ++seed) {
    SimConfig c;
    c.seed = static_cast<std::uint64_t>(seed);
    c.cycle_cap = kCycleCap;
    const auto r = run(c, false);
    if (!r.terminated || r.delivered != c.n_packages) ++unfinished;
    longest = std::max(longest, r.cycles);
  }
  report("termination", unfinished == 0,
         std::to_string(kSeededRuns) + " runs, unfinished = " + std::to_string(unfinished) +
             ", longest = " + std::to_string(longest) + " cycles");
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();

  ExperimentSpec idle;
  idle.replications = kReplications;
  const auto idle_rows = run_experiment(idle);
  const auto idle_cells = summarize(idle_rows);

  idle_ordering(idle_cells);
  privacy_trend();
  saturation(idle_cells);
  oracle_suite();
  invariant_suite();
  determinism(idle_rows, idle);
  scenario_contracts();
  termination();

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s  %d failing criteria, %.1f s\n", failures == 0 ? "ALL PASS" : "FAILED", failures, seconds);
  return failures == 0 ? 0 : 1;
}
