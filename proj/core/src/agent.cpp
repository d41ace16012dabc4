#include "emotrust/agent.hpp"

#include <algorithm>
#include <string>

namespace emotrust::agent {

namespace {

template <typename Better>
std::optional<PackageId> select_package(Cell from, const std::set<PackageId>& ids,
                                        const world::World& world, Better better) {
  std::optional<PackageId> best;
  int best_distance = 0;
  for (PackageId id : ids) {  // ascending, so strict comparison keeps the lower id
    const int d = world::chebyshev_distance(from, world.package(id).destination);
    if (!best || better(d, best_distance)) {
      best = id;
      best_distance = d;
    }
  }
  return best;
}

}  // namespace

std::optional<PackageId> closest_package(Cell from, const std::set<PackageId>& ids,
                                         const world::World& world) {
  return select_package(from, ids, world, [](int d, int best) { return d < best; });
}

std::optional<PackageId> farthest_package(Cell from, const std::set<PackageId>& ids,
                                          const world::World& world) {
  return select_package(from, ids, world, [](int d, int best) { return d > best; });
}

void Agent::perceive(const world::World& world, std::size_t busy_threshold) {
  const auto& self = world.body(id_);

  // Drop anything that left our hands outside the callbacks.
  if (beliefs_.current && !self.carried.contains(*beliefs_.current)) beliefs_.current.reset();
  std::erase_if(beliefs_.moving, [&](PackageId p) { return !self.carried.contains(p); });

  beliefs_.pending.clear();
  for (PackageId p : self.carried) {
    if (p != beliefs_.current && !beliefs_.moving.contains(p)) beliefs_.pending.insert(p);
  }

  beliefs_.busy_carriers.clear();
  for (const auto& b : world.bodies()) {
    if (b.id == id_ || b.carried.size() < std::max<std::size_t>(1, busy_threshold)) continue;
    beliefs_.busy_carriers.push_back({b.id, b.position});
  }
}

MoveIntent Agent::deliberate(const world::World& world) {
  if (desire_ == Desire::idle) {
    MoveIntent intent = plan_idle(world);
    if (desire_ == Desire::idle) return intent;
  }
  return plan_moving(world);
}

MoveIntent Agent::plan_idle(const world::World& world) {
  if (desire_ != Desire::idle) throw world::ContractViolation("plan_idle requires the idle desire");
  const Cell here = world.body(id_).position;

  if (!beliefs_.pending.empty()) {
    beliefs_.current = closest_package(here, beliefs_.pending, world);
    beliefs_.pending.erase(*beliefs_.current);
    beliefs_.moving.merge(beliefs_.pending);
    beliefs_.pending.clear();
    switch_desire(Desire::moving);
    return {};
  }

  const BusyCarrier* nearest = nullptr;
  int nearest_distance = 0;
  for (const auto& c : beliefs_.busy_carriers) {
    const int d = world::chebyshev_distance(here, c.position);
    if (!nearest || d < nearest_distance) {
      nearest = &c;
      nearest_distance = d;
    }
  }
  if (!nearest) return {};
  return {nearest->position, std::nullopt};
}

MoveIntent Agent::plan_moving(const world::World& world) {
  if (desire_ != Desire::moving || !beliefs_.current) {
    throw world::ContractViolation("plan_moving requires the moving desire and a current package");
  }
  beliefs_.moving.merge(beliefs_.pending);
  beliefs_.pending.clear();
  return {world.package(*beliefs_.current).destination, beliefs_.current};
}

std::optional<PackageId> Agent::delegation_candidate(const world::World& world) const {
  if (desire_ != Desire::moving || beliefs_.moving.empty()) return std::nullopt;
  const Cell here = world.body(id_).position;
  auto candidate = farthest_package(here, beliefs_.moving, world);
  if (candidate && world::chebyshev_distance(here, world.package(*candidate).destination) == 0) {
    return std::nullopt;
  }
  return candidate;
}

void Agent::on_handed_off(PackageId pkg) {
  if (beliefs_.current == pkg) throw world::ContractViolation("the current package is never delegated");
  beliefs_.moving.erase(pkg);
  beliefs_.pending.erase(pkg);
}

void Agent::on_delivered(PackageId pkg, const world::World& world) {
  beliefs_.pending.erase(pkg);
  beliefs_.moving.erase(pkg);
  if (beliefs_.current != pkg) return;

  beliefs_.current.reset();
  if (auto next = closest_package(world.body(id_).position, beliefs_.moving, world)) {
    beliefs_.moving.erase(*next);
    beliefs_.current = next;
  } else {
    switch_desire(Desire::idle);
  }
}

void Agent::switch_desire(Desire next) {
  if (next == desire_) return;
  transitions_.emplace_back(desire_, next);
  desire_ = next;
}

void Agent::check_invariants(const world::World& world) const {
  const auto fail = [&](const std::string& what) {
    throw world::InvariantViolation("agent " + std::to_string(id_) + ": " + what);
  };
  if ((desire_ == Desire::moving) != beliefs_.current.has_value()) {
    fail("current package must be defined exactly while moving");
  }
  if (beliefs_.current && beliefs_.moving.contains(*beliefs_.current)) {
    fail("current package also listed as moving");
  }
  const auto& self = world.body(id_);
  auto owned = [&](PackageId p) { return self.carried.contains(p) && !world.package(p).delivered(); };
  if (beliefs_.current && !owned(*beliefs_.current)) fail("current package not carried");
  for (PackageId p : beliefs_.moving) {
    if (!owned(p)) fail("moving package " + std::to_string(p) + " not carried");
  }
  for (const auto& [from, to] : transitions_) {
    if (from == to) fail("self transition in desire automaton");
  }
}

std::string_view to_string(Desire d) { return d == Desire::idle ? "idle" : "moving"; }

}  // namespace emotrust::agent
