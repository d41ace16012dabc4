#include "emotrust/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

namespace emotrust::harness {

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

ResultRow make_row(const ExperimentSpec& spec, Scenario scenario, double value, int replication,
                   const RunResult& result) {
  ResultRow row;
  row.scenario = scenario;
  row.sweep = spec.sweep;
  row.value = value;
  row.replication = replication;
  row.seed = spec.base.seed + static_cast<std::uint64_t>(replication);
  row.total_reward = result.total_reward;
  row.cycles = result.cycles;
  row.terminated = result.terminated;
  row.on_time = result.on_time;
  row.late = result.late;
  row.disclosures = result.disclosures;
  row.cfp_sent = result.cfp_sent;
  row.cfp_accepted = result.cfp_accepted;
  row.cfp_refused = result.cfp_refused;
  return row;
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, unsigned threads) {
  spec.validate();

  struct Job {
    Scenario scenario;
    double value;
    int replication;
  };
  // Canonical order: scenario (as listed), value, replication.
  std::vector<Job> jobs;
  for (Scenario s : spec.scenarios) {
    for (double v : spec.values) {
      for (int r = 0; r < spec.replications; ++r) jobs.push_back({s, v, r});
    }
  }

  std::vector<ResultRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const auto& job = jobs[i];
        const auto result = run(spec.config_for(job.scenario, job.value, job.replication), false);
        rows[i] = make_row(spec, job.scenario, job.value, job.replication, result);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::vector<SummaryCell> summarize(std::span<const ResultRow> rows) {
  struct Acc {
    Scenario scenario;
    double value;
    std::vector<double> rewards;
  };
  std::vector<Acc> groups;
  for (const auto& r : rows) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Acc& a) { return a.scenario == r.scenario && a.value == r.value; });
    if (it == groups.end()) {
      groups.push_back({r.scenario, r.value, {}});
      it = std::prev(groups.end());
    }
    it->rewards.push_back(r.total_reward);
  }

  std::vector<SummaryCell> cells;
  for (const auto& g : groups) {
    const auto n = static_cast<double>(g.rewards.size());
    const double mean = std::accumulate(g.rewards.begin(), g.rewards.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : g.rewards) ss += (x - mean) * (x - mean);
    const double sd = g.rewards.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    const auto [lo, hi] = std::minmax_element(g.rewards.begin(), g.rewards.end());
    cells.push_back({g.scenario, g.value, static_cast<int>(g.rewards.size()), mean, sd, *lo, *hi});
  }
  return cells;
}

const SummaryCell* find_cell(std::span<const SummaryCell> cells, Scenario scenario, double value) {
  for (const auto& c : cells) {
    if (c.scenario == scenario && std::abs(c.value - value) < 1e-12) return &c;
  }
  return nullptr;
}

void write_rows_csv(std::ostream& out, std::span<const ResultRow> rows) {
  out << "scenario,sweep,value,replication,seed,total_reward,cycles,terminated,on_time,late,"
         "disclosures,cfp_sent,cfp_accepted,cfp_refused\n";
  for (const auto& r : rows) {
    out << to_string(r.scenario) << ',' << to_string(r.sweep) << ',' << format_number(r.value) << ','
        << r.replication << ',' << r.seed << ',' << format_number(r.total_reward) << ',' << r.cycles
        << ',' << (r.terminated ? 1 : 0) << ',' << r.on_time << ',' << r.late << ',' << r.disclosures
        << ',' << r.cfp_sent << ',' << r.cfp_accepted << ',' << r.cfp_refused << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryCell> cells) {
  out << "scenario,value,n,mean,sd,min,max\n";
  for (const auto& c : cells) {
    out << to_string(c.scenario) << ',' << format_number(c.value) << ',' << c.n << ','
        << format_number(c.mean) << ',' << format_number(c.sd) << ',' << format_number(c.min) << ','
        << format_number(c.max) << '\n';
  }
}

void write_summary_table(std::ostream& out, std::span<const SummaryCell> cells, SweepVariable sweep) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::left << std::setw(16) << "scenario" << std::right << std::setw(14) << to_string(sweep)
      << std::setw(6) << "n" << std::setw(11) << "mean" << std::setw(10) << "sd" << std::setw(10)
      << "min" << std::setw(10) << "max" << '\n';
  out << std::fixed << std::setprecision(3);
  for (const auto& c : cells) {
    out << std::left << std::setw(16) << to_string(c.scenario) << std::right << std::setw(14)
        << std::setprecision(2) << c.value << std::setprecision(3) << std::setw(6) << c.n
        << std::setw(11) << c.mean << std::setw(10) << c.sd << std::setw(10) << c.min
        << std::setw(10) << c.max << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nan("");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nan("");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace emotrust::harness
