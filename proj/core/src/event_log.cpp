#include "emotrust/event_log.hpp"

#include <ostream>

#include "json.hpp"

namespace emotrust {

void EventLog::append(std::string line) {
  if (enabled_) lines_.push_back(std::move(line));
}

std::string EventLog::to_jsonl() const {
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

void EventLog::write(std::ostream& out) const {
  for (const auto& l : lines_) out << l << '\n';
}

std::string message_json(const protocol::Message& m) {
  nlohmann::ordered_json j;
  j["cycle"] = m.cycle;
  j["performative"] = protocol::to_string(m.performative);
  j["sender"] = m.sender;
  j["receiver"] = m.receiver;
  j["conversation"] = m.conversation;
  j["package"] = m.package;
  j["deadline"] = m.deadline_cycle;
  if (m.performative == protocol::Performative::inform_failure) j["delay"] = m.delay_cycles;
  return j.dump();
}

}  // namespace emotrust
