#pragma once

#include <compare>
#include <cstdint>

namespace emotrust {

using AgentId = int;
using PackageId = int;
using ConversationId = std::int64_t;

struct Cell {
  int x = 0;
  int y = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

}  // namespace emotrust
