#pragma once

#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "emotrust/types.hpp"
#include "emotrust/world.hpp"

namespace emotrust::agent {

enum class Desire { idle, moving };

struct BusyCarrier {
  AgentId id;
  Cell position;
};

struct BeliefBase {
  std::set<PackageId> pending;
  std::vector<BusyCarrier> busy_carriers;  // ascending id
  std::optional<PackageId> current;
  std::set<PackageId> moving;
};

/// Where the body should step this cycle and which package it is serving
/// (the package whose personality hold, if any, applies).
struct MoveIntent {
  std::optional<Cell> target;
  std::optional<PackageId> serving;
};

/// Closest / farthest by Chebyshev distance from `from` to each destination,
/// lower id on ties.
std::optional<PackageId> closest_package(Cell from, const std::set<PackageId>& ids,
                                         const world::World& world);
std::optional<PackageId> farthest_package(Cell from, const std::set<PackageId>& ids,
                                          const world::World& world);

/// Deliberation for one carrier: two desires (idle, moving) and their plans.
class Agent {
 public:
  explicit Agent(AgentId id) : id_(id) {}

  AgentId id() const { return id_; }
  Desire desire() const { return desire_; }
  const BeliefBase& beliefs() const { return beliefs_; }

  /// Refreshes pending packages (carried but not yet adopted) and the busy
  /// carriers seen on the grid. Runs every cycle regardless of desire.
  /// `busy_threshold` is the number of carried boxes that makes another
  /// agent count as a busy carrier.
  void perceive(const world::World& world, std::size_t busy_threshold = 1);

  /// Runs the plan of the active desire. An idle agent that adopts a package
  /// continues straight into the moving plan in the same cycle.
  MoveIntent deliberate(const world::World& world);

  /// Idle plan: adopt the closest pending package or chase the closest busy carrier.
  MoveIntent plan_idle(const world::World& world);

  /// Moving plan: absorb pending packages and head for the current destination.
  MoveIntent plan_moving(const world::World& world);

  /// Farthest additional package for a meeting with `peer`, or nullopt when
  /// nothing is delegable. Packages already on their destination cell are
  /// never offered.
  std::optional<PackageId> delegation_candidate(const world::World& world) const;

  void on_handed_off(PackageId pkg);
  void on_delivered(PackageId pkg, const world::World& world);

  const std::vector<std::pair<Desire, Desire>>& transitions() const { return transitions_; }

  /// Throws world::InvariantViolation on a broken belief/desire invariant.
  void check_invariants(const world::World& world) const;

 private:
  void switch_desire(Desire next);

  AgentId id_;
  Desire desire_ = Desire::idle;
  BeliefBase beliefs_;
  std::vector<std::pair<Desire, Desire>> transitions_;
};

std::string_view to_string(Desire d);

}  // namespace emotrust::agent
