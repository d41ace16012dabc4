#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "emotrust/config.hpp"
#include "emotrust/engine.hpp"

namespace emotrust::harness {

struct ResultRow {
  Scenario scenario = Scenario::emotionaltrust;
  SweepVariable sweep = SweepVariable::idle_fraction;
  double value = 0.0;
  int replication = 0;
  std::uint64_t seed = 0;
  double total_reward = 0.0;
  int cycles = 0;
  bool terminated = false;
  int on_time = 0;
  int late = 0;
  int disclosures = 0;
  int cfp_sent = 0;
  int cfp_accepted = 0;
  int cfp_refused = 0;
};

ResultRow make_row(const ExperimentSpec& spec, Scenario scenario, double value, int replication,
                   const RunResult& result);

/// Runs |scenarios| x |values| x replications simulations on `threads`
/// workers (0 = hardware concurrency). Rows come back ordered by scenario,
/// value and replication regardless of completion order.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, unsigned threads = 0);

struct SummaryCell {
  Scenario scenario;
  double value;
  int n;
  double mean;
  double sd;  ///< sample standard deviation, 0 for a single row
  double min;
  double max;
};

/// Total-reward statistics per (scenario, value), in first-appearance order.
std::vector<SummaryCell> summarize(std::span<const ResultRow> rows);

const SummaryCell* find_cell(std::span<const SummaryCell> cells, Scenario scenario, double value);

void write_rows_csv(std::ostream& out, std::span<const ResultRow> rows);
void write_summary_csv(std::ostream& out, std::span<const SummaryCell> cells);
void write_summary_table(std::ostream& out, std::span<const SummaryCell> cells, SweepVariable sweep);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

}  // namespace emotrust::harness
