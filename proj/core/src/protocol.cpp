#include "emotrust/protocol.hpp"

#include <algorithm>
#include <string>

namespace emotrust::protocol {

using S = ConversationState;
using P = Performative;

bool is_terminal(ConversationState s) {
  return s == S::refused || s == S::rejected || s == S::done || s == S::failed;
}

bool is_legal_transition(ConversationState from, ConversationState to) {
  switch (from) {
    case S::started: return to == S::proposed || to == S::refused;
    case S::proposed: return to == S::accepted || to == S::rejected;
    case S::accepted: return to == S::done || to == S::failed;
    default: return false;
  }
}

std::optional<ConversationState> next_state(std::optional<ConversationState> from, Performative p) {
  if (!from) return p == P::cfp ? std::optional{S::started} : std::nullopt;
  switch (*from) {
    case S::started:
      if (p == P::propose) return S::proposed;
      if (p == P::refuse) return S::refused;
      break;
    case S::proposed:
      if (p == P::accept_proposal) return S::accepted;
      if (p == P::reject_proposal) return S::rejected;
      break;
    case S::accepted:
      if (p == P::inform_done) return S::done;
      if (p == P::inform_failure) return S::failed;
      break;
    default:
      break;
  }
  return std::nullopt;
}

bool conforms(std::span<const Performative> sequence) {
  std::optional<ConversationState> state;
  for (Performative p : sequence) {
    auto next = next_state(state, p);
    if (!next) return false;
    state = next;
  }
  return !sequence.empty();
}

std::vector<AgentId> DelegationChain::carrier_history() const {
  std::vector<AgentId> history{owner};
  for (const auto& link : links) history.push_back(link.delegatee);
  return history;
}

std::vector<AgentId> DelegationChain::members() const {
  std::vector<AgentId> out;
  for (AgentId a : carrier_history()) {
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  return out;
}

bool DelegationChain::is_linked() const {
  AgentId holder = owner;
  for (const auto& link : links) {
    if (link.delegator != holder || link.delegatee == link.delegator) return false;
    holder = link.delegatee;
  }
  return true;
}

ContractNet::Opened ContractNet::initiate_cfp(AgentId initiator, AgentId responder,
                                              const world::Package& pkg, int cycle) {
  if (initiator == responder) throw ProtocolError("an agent cannot delegate to itself");
  if (pkg.delivered() || pkg.carrier != initiator) {
    throw ProtocolError("agent " + std::to_string(initiator) + " does not carry package " +
                        std::to_string(pkg.id));
  }
  if (cycle != pair_cycle_) {
    pair_cycle_ = cycle;
    pairs_this_cycle_.clear();
  }
  const auto pair = std::minmax(initiator, responder);
  if (pairs_this_cycle_.contains(pair)) {
    throw ProtocolError("only one CFP per agent pair per cycle");
  }
  if (negotiating_.contains(pkg.id)) throw ProtocolError("package already under negotiation");
  if (is_back_delegation(pkg.id, initiator, responder)) {
    throw ProtocolError("package cannot be handed back to its direct delegator");
  }

  pairs_this_cycle_.insert(pair);
  negotiating_.insert(pkg.id);
  deadlines_[pkg.id] = pkg.deadline_cycle;
  if (!chains_.contains(pkg.id)) chains_[pkg.id] = DelegationChain{pkg.id, pkg.owner, {}};

  CfpConversation conv;
  conv.id = static_cast<ConversationId>(conversations_.size());
  conv.initiator = initiator;
  conv.responder = responder;
  conv.package = pkg.id;
  conv.cycle = cycle;
  conv.state = S::started;
  conversations_.push_back(conv);
  return {conv.id, record(conv, P::cfp, initiator, responder, pkg.deadline_cycle, cycle)};
}

Message ContractNet::respond(ConversationId id, bool accept, int cycle) {
  auto& conv = mutable_conversation(id);
  const P p = accept ? P::propose : P::refuse;
  transition(conv, p);
  if (!accept) negotiating_.erase(conv.package);
  return record(conv, p, conv.responder, conv.initiator, deadlines_.at(conv.package), cycle);
}

std::pair<Message, HandOff> ContractNet::conclude(ConversationId id, int cycle) {
  auto& conv = mutable_conversation(id);
  transition(conv, P::accept_proposal);
  negotiating_.erase(conv.package);
  auto& chain = chains_.at(conv.package);
  chain.links.push_back({conv.initiator, conv.responder, cycle, conv.id});
  if (!chain.is_linked()) throw ProtocolError("delegation chain broken by conversation " + std::to_string(id));
  auto msg = record(conv, P::accept_proposal, conv.initiator, conv.responder,
                    deadlines_.at(conv.package), cycle);
  return {msg, HandOff{conv.package, conv.initiator, conv.responder}};
}

Message ContractNet::reject(ConversationId id, int cycle) {
  auto& conv = mutable_conversation(id);
  transition(conv, P::reject_proposal);
  negotiating_.erase(conv.package);
  return record(conv, P::reject_proposal, conv.initiator, conv.responder,
                deadlines_.at(conv.package), cycle);
}

std::vector<Message> ContractNet::settle(const world::Package& pkg, int delay_cycles, int cycle) {
  std::vector<Message> out;
  auto it = chains_.find(pkg.id);
  if (it == chains_.end()) return out;
  const P p = delay_cycles == 0 ? P::inform_done : P::inform_failure;
  for (const auto& link : it->second.links) {
    auto& conv = mutable_conversation(link.conversation);
    transition(conv, p);
    out.push_back(record(conv, p, link.delegatee, link.delegator, pkg.deadline_cycle, cycle,
                         delay_cycles));
  }
  return out;
}

bool ContractNet::is_back_delegation(PackageId pkg, AgentId initiator, AgentId responder) const {
  auto it = chains_.find(pkg);
  if (it == chains_.end() || it->second.links.empty()) return false;
  const auto& last = it->second.links.back();
  return last.delegatee == initiator && last.delegator == responder;
}

const CfpConversation& ContractNet::conversation(ConversationId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= conversations_.size()) {
    throw ProtocolError("unknown conversation " + std::to_string(id));
  }
  return conversations_[static_cast<std::size_t>(id)];
}

CfpConversation& ContractNet::mutable_conversation(ConversationId id) {
  return const_cast<CfpConversation&>(std::as_const(*this).conversation(id));
}

const DelegationChain* ContractNet::chain(PackageId pkg) const {
  auto it = chains_.find(pkg);
  return it == chains_.end() ? nullptr : &it->second;
}

bool ContractNet::all_terminal() const {
  return std::all_of(conversations_.begin(), conversations_.end(),
                     [](const CfpConversation& c) { return is_terminal(c.state); });
}

void ContractNet::transition(CfpConversation& conv, Performative p) {
  auto next = next_state(conv.state, p);
  if (!next) {
    throw ProtocolError("illegal " + std::string(to_string(p)) + " in state " +
                        std::string(to_string(conv.state)) + " (conversation " +
                        std::to_string(conv.id) + ")");
  }
  conv.state = *next;
}

Message ContractNet::record(const CfpConversation& conv, Performative p, AgentId sender,
                            AgentId receiver, int deadline, int cycle, int delay) {
  Message m;
  m.cycle = cycle;
  m.performative = p;
  m.sender = sender;
  m.receiver = receiver;
  m.conversation = conv.id;
  m.package = conv.package;
  m.deadline_cycle = deadline;
  m.delay_cycles = delay;
  messages_.push_back(m);
  return m;
}

std::string_view to_string(Performative p) {
  switch (p) {
    case P::cfp: return "cfp";
    case P::propose: return "propose";
    case P::refuse: return "refuse";
    case P::accept_proposal: return "accept_proposal";
    case P::reject_proposal: return "reject_proposal";
    case P::inform_done: return "inform_done";
    case P::inform_failure: return "inform_failure";
  }
  return "cfp";
}

std::string_view to_string(ConversationState s) {
  switch (s) {
    case S::started: return "started";
    case S::proposed: return "proposed";
    case S::refused: return "refused";
    case S::accepted: return "accepted";
    case S::rejected: return "rejected";
    case S::done: return "done";
    case S::failed: return "failed";
  }
  return "started";
}

}  // namespace emotrust::protocol
