#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "emotrust/affect.hpp"
#include "emotrust/rng.hpp"
#include "emotrust/types.hpp"

namespace emotrust::world {

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when a cross-checked model invariant does not hold.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Grid {
  int size = 30;

  bool contains(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < size && c.y < size; }
};

int chebyshev_distance(Cell a, Cell b);

/// Deadline measured from the owner's starting cell with multiplicative slack.
int deadline_for(Cell start, Cell destination, int assignment_cycle, double slack);

struct Package {
  PackageId id = 0;
  AgentId owner = 0;
  std::optional<AgentId> carrier;
  Cell destination;
  int assignment_cycle = 0;
  int deadline_cycle = 0;
  std::map<AgentId, bool> privacy_for;
  std::optional<int> delivered_cycle;

  bool delivered() const { return delivered_cycle.has_value(); }
  bool is_private_for(AgentId agent) const;
};

struct AgentBody {
  AgentId id = 0;
  Cell position;
  affect::Personality personality = affect::Personality::extroverted;
  std::set<PackageId> carried;
  std::map<PackageId, int> start_delay_pending;
};

/// One Moore step toward `target`. If `serving` has a pending personality
/// hold the agent stays put and the hold is consumed instead.
void step_toward(AgentBody& body, Cell target, const Grid& grid,
                 std::optional<PackageId> serving = std::nullopt);

struct MeetingGroup {
  Cell cell;
  std::vector<AgentId> members;  // ascending

  /// Every unordered pair, lexicographic by (lower id, higher id).
  std::vector<std::pair<AgentId, AgentId>> pairs() const;
};

/// Groups of two or more agents sharing a cell, ordered by lowest member id.
std::vector<MeetingGroup> detect_meetings(std::span<const AgentBody> bodies);

/// Privacy of `pkg` for `agent`, drawn from Bernoulli(prob) the first time it
/// is needed and fixed afterwards.
bool sample_privacy(Package& pkg, AgentId agent, double prob, Rng& rng);

/// Grid, bodies and packages of one run. Ids are dense indices.
class World {
 public:
  explicit World(Grid grid);

  AgentId add_agent(Cell position, affect::Personality personality);

  /// Creates an unassigned package; `assign_package` gives it its first carrier.
  PackageId add_package(AgentId owner, Cell destination, int assignment_cycle, int deadline_cycle);

  /// Moves `pkg` to `to`, sampling its privacy for `to` if still unknown and
  /// registering the personality start hold (neurotic always, psychotic on
  /// delegated boxes).
  void assign_package(PackageId pkg, AgentId to, int cycle, double privacy_prob, Rng& rng);

  struct Delivery {
    PackageId package;
    AgentId carrier;
  };

  /// Marks every carried package whose carrier stands on its destination as
  /// delivered at `cycle`. Results are ordered by package id.
  std::vector<Delivery> deliver_arrived(int cycle);

  const Grid& grid() const { return grid_; }
  const std::vector<AgentBody>& bodies() const { return bodies_; }
  const std::vector<Package>& packages() const { return packages_; }
  AgentBody& body(AgentId id);
  const AgentBody& body(AgentId id) const;
  Package& package(PackageId id);
  const Package& package(PackageId id) const;

  bool all_delivered() const;
  std::size_t undelivered_count() const;

  /// Throws InvariantViolation if carrier fields and carried sets disagree or
  /// a body is off-grid.
  void check_conservation() const;

 private:
  Grid grid_;
  std::vector<AgentBody> bodies_;
  std::vector<Package> packages_;
};

}  // namespace emotrust::world
