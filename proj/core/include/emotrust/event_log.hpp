#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "emotrust/protocol.hpp"

namespace emotrust {

/// Append-only JSONL record of a run. Each entry is one serialized object.
class EventLog {
 public:
  explicit EventLog(bool enabled = true) : enabled_(enabled) {}

  bool enabled() const { return enabled_; }
  void append(std::string line);
  const std::vector<std::string>& lines() const { return lines_; }
  std::size_t size() const { return lines_.size(); }

  std::string to_jsonl() const;
  void write(std::ostream& out) const;

 private:
  bool enabled_;
  std::vector<std::string> lines_;
};

/// {"cycle","performative","sender","receiver","conversation","package",...}
std::string message_json(const protocol::Message& m);

}  // namespace emotrust
