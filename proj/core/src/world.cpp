#include "emotrust/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace emotrust::world {

namespace {
int sign(int v) { return (v > 0) - (v < 0); }
}  // namespace

int chebyshev_distance(Cell a, Cell b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

int deadline_for(Cell start, Cell destination, int assignment_cycle, double slack) {
  const double span = slack * chebyshev_distance(start, destination);
  // 1e-9 keeps exact products like 1.5 * 4 from rounding up to the next cycle.
  return assignment_cycle + static_cast<int>(std::ceil(span - 1e-9));
}

bool Package::is_private_for(AgentId agent) const {
  auto it = privacy_for.find(agent);
  return it != privacy_for.end() && it->second;
}

void step_toward(AgentBody& body, Cell target, const Grid& grid, std::optional<PackageId> serving) {
  if (!grid.contains(target)) throw ContractViolation("step target outside the grid");
  if (serving) {
    auto hold = body.start_delay_pending.find(*serving);
    if (hold != body.start_delay_pending.end() && hold->second > 0) {
      if (--hold->second == 0) body.start_delay_pending.erase(hold);
      return;
    }
  }
  body.position.x += sign(target.x - body.position.x);
  body.position.y += sign(target.y - body.position.y);
}

std::vector<std::pair<AgentId, AgentId>> MeetingGroup::pairs() const {
  std::vector<std::pair<AgentId, AgentId>> out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) out.emplace_back(members[i], members[j]);
  }
  return out;
}

std::vector<MeetingGroup> detect_meetings(std::span<const AgentBody> bodies) {
  std::map<Cell, std::vector<AgentId>> by_cell;
  for (const auto& b : bodies) by_cell[b.position].push_back(b.id);

  std::vector<MeetingGroup> groups;
  for (auto& [cell, ids] : by_cell) {
    if (ids.size() < 2) continue;
    std::sort(ids.begin(), ids.end());
    groups.push_back({cell, ids});
  }
  std::sort(groups.begin(), groups.end(),
            [](const MeetingGroup& a, const MeetingGroup& b) { return a.members[0] < b.members[0]; });
  return groups;
}

bool sample_privacy(Package& pkg, AgentId agent, double prob, Rng& rng) {
  auto [it, inserted] = pkg.privacy_for.try_emplace(agent, false);
  if (inserted) it->second = rng.bernoulli(prob);
  return it->second;
}

World::World(Grid grid) : grid_(grid) {
  if (grid_.size <= 0) throw ContractViolation("grid size must be positive");
}

AgentId World::add_agent(Cell position, affect::Personality personality) {
  if (!grid_.contains(position)) throw ContractViolation("agent placed outside the grid");
  const auto id = static_cast<AgentId>(bodies_.size());
  bodies_.push_back({id, position, personality, {}, {}});
  return id;
}

PackageId World::add_package(AgentId owner, Cell destination, int assignment_cycle,
                             int deadline_cycle) {
  if (!grid_.contains(destination)) throw ContractViolation("destination outside the grid");
  body(owner);  // bounds check
  const auto id = static_cast<PackageId>(packages_.size());
  Package p;
  p.id = id;
  p.owner = owner;
  p.destination = destination;
  p.assignment_cycle = assignment_cycle;
  p.deadline_cycle = deadline_cycle;
  packages_.push_back(std::move(p));
  return id;
}

void World::assign_package(PackageId pkg_id, AgentId to, int /*cycle*/, double privacy_prob,
                           Rng& rng) {
  Package& pkg = package(pkg_id);
  if (pkg.delivered()) throw ContractViolation("cannot assign a delivered package");
  AgentBody& receiver = body(to);
  if (pkg.carrier) {
    if (*pkg.carrier == to) throw ContractViolation("package already carried by the assignee");
    AgentBody& giver = body(*pkg.carrier);
    giver.carried.erase(pkg_id);
    giver.start_delay_pending.erase(pkg_id);
  }
  pkg.carrier = to;
  receiver.carried.insert(pkg_id);
  sample_privacy(pkg, to, privacy_prob, rng);

  const bool delegated = to != pkg.owner;
  if (receiver.personality == affect::Personality::neurotic ||
      (delegated && receiver.personality == affect::Personality::psychotic)) {
    receiver.start_delay_pending[pkg_id] = 1;
  }
}

std::vector<World::Delivery> World::deliver_arrived(int cycle) {
  std::vector<Delivery> delivered;
  for (auto& b : bodies_) {
    for (auto it = b.carried.begin(); it != b.carried.end();) {
      Package& p = packages_[static_cast<std::size_t>(*it)];
      if (p.destination == b.position) {
        p.delivered_cycle = cycle;
        p.carrier.reset();
        b.start_delay_pending.erase(p.id);
        delivered.push_back({p.id, b.id});
        it = b.carried.erase(it);
      } else {
        ++it;
      }
    }
  }
  std::sort(delivered.begin(), delivered.end(),
            [](const Delivery& a, const Delivery& b) { return a.package < b.package; });
  return delivered;
}

AgentBody& World::body(AgentId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= bodies_.size()) throw ContractViolation("unknown agent id");
  return bodies_[static_cast<std::size_t>(id)];
}

const AgentBody& World::body(AgentId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= bodies_.size()) throw ContractViolation("unknown agent id");
  return bodies_[static_cast<std::size_t>(id)];
}

Package& World::package(PackageId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= packages_.size()) throw ContractViolation("unknown package id");
  return packages_[static_cast<std::size_t>(id)];
}

const Package& World::package(PackageId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= packages_.size()) throw ContractViolation("unknown package id");
  return packages_[static_cast<std::size_t>(id)];
}

bool World::all_delivered() const { return undelivered_count() == 0; }

std::size_t World::undelivered_count() const {
  return static_cast<std::size_t>(
      std::count_if(packages_.begin(), packages_.end(), [](const Package& p) { return !p.delivered(); }));
}

void World::check_conservation() const {
  for (const auto& b : bodies_) {
    if (!grid_.contains(b.position)) {
      throw InvariantViolation("agent " + std::to_string(b.id) + " is off the grid");
    }
    for (PackageId pid : b.carried) {
      const auto& p = package(pid);
      if (p.delivered() || p.carrier != b.id) {
        throw InvariantViolation("agent " + std::to_string(b.id) + " carries package " +
                                 std::to_string(pid) + " whose carrier field disagrees");
      }
    }
  }
  for (const auto& p : packages_) {
    if (p.delivered()) {
      if (p.carrier) throw InvariantViolation("delivered package " + std::to_string(p.id) + " still has a carrier");
      continue;
    }
    if (!p.carrier) throw InvariantViolation("undelivered package " + std::to_string(p.id) + " has no carrier");
    if (!body(*p.carrier).carried.contains(p.id)) {
      throw InvariantViolation("package " + std::to_string(p.id) + " missing from its carrier's set");
    }
  }
}

}  // namespace emotrust::world
