#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "emotrust/types.hpp"
#include "emotrust/world.hpp"

namespace emotrust::protocol {

enum class Performative {
  cfp,
  propose,
  refuse,
  accept_proposal,
  reject_proposal,
  inform_done,
  inform_failure,
};

enum class ConversationState { started, proposed, refused, accepted, rejected, done, failed };

/// Illegal protocol use (wrong state, duplicate CFP, self-delegation, ...).
class ProtocolError : public world::ContractViolation {
 public:
  using world::ContractViolation::ContractViolation;
};

bool is_terminal(ConversationState s);
bool is_legal_transition(ConversationState from, ConversationState to);

/// State reached by sending `p` in state `from` (`nullopt` meaning "no
/// conversation yet"), or nullopt if `p` is not allowed there.
std::optional<ConversationState> next_state(std::optional<ConversationState> from, Performative p);

/// True iff the performative sequence of one conversation is a walk of the
/// legal transition graph starting with a cfp.
bool conforms(std::span<const Performative> sequence);

struct Message {
  int cycle = 0;
  Performative performative = Performative::cfp;
  AgentId sender = 0;
  AgentId receiver = 0;
  ConversationId conversation = 0;
  PackageId package = 0;
  int deadline_cycle = 0;
  int delay_cycles = 0;  ///< only meaningful for inform_failure
};

struct CfpConversation {
  ConversationId id = 0;
  AgentId initiator = 0;
  AgentId responder = 0;
  PackageId package = 0;
  int cycle = 0;
  ConversationState state = ConversationState::started;
};

struct DelegationLink {
  AgentId delegator = 0;
  AgentId delegatee = 0;
  int cycle = 0;
  ConversationId conversation = 0;
};

struct DelegationChain {
  PackageId package = 0;
  AgentId owner = 0;
  std::vector<DelegationLink> links;

  /// Owner followed by each delegatee in hand-off order.
  std::vector<AgentId> carrier_history() const;
  /// Distinct agents that carried the package, in first-appearance order.
  std::vector<AgentId> members() const;
  /// Consecutive links share an agent and the first starts at the owner.
  bool is_linked() const;
};

struct HandOff {
  PackageId package = 0;
  AgentId from = 0;
  AgentId to = 0;
};

/// Book-keeping for every contract-net exchange of one run: conversation
/// states, the message trace and per-package delegation chains.
class ContractNet {
 public:
  struct Opened {
    ConversationId id;
    Message cfp;
  };

  /// Requires `pkg` to be carried by `initiator`, a distinct responder, no
  /// other CFP between the pair this cycle, no open negotiation on `pkg` and
  /// no hand-back to the agent that delegated `pkg` to the initiator.
  Opened initiate_cfp(AgentId initiator, AgentId responder, const world::Package& pkg, int cycle);

  /// propose when `accept`, refuse otherwise.
  Message respond(ConversationId id, bool accept, int cycle);

  /// Initiator accepts the proposal; the caller performs the returned hand-off.
  std::pair<Message, HandOff> conclude(ConversationId id, int cycle);

  /// Initiator declines a proposal. The engine never does this, but the
  /// protocol allows it.
  Message reject(ConversationId id, int cycle);

  /// Notifies every delegator in the package's chain of the final outcome:
  /// inform_done when on time, inform_failure carrying the delay otherwise.
  std::vector<Message> settle(const world::Package& pkg, int delay_cycles, int cycle);

  /// True if handing `pkg` from `initiator` to `responder` would return it
  /// to the agent that delegated it to `initiator`.
  bool is_back_delegation(PackageId pkg, AgentId initiator, AgentId responder) const;

  const CfpConversation& conversation(ConversationId id) const;
  const std::vector<CfpConversation>& conversations() const { return conversations_; }
  const std::vector<Message>& messages() const { return messages_; }
  const DelegationChain* chain(PackageId pkg) const;
  const std::map<PackageId, DelegationChain>& chains() const { return chains_; }

  bool all_terminal() const;

 private:
  CfpConversation& mutable_conversation(ConversationId id);
  void transition(CfpConversation& conv, Performative p);
  Message record(const CfpConversation& conv, Performative p, AgentId sender, AgentId receiver,
                 int deadline, int cycle, int delay = 0);

  std::vector<CfpConversation> conversations_;
  std::vector<Message> messages_;
  std::map<PackageId, DelegationChain> chains_;
  std::map<PackageId, int> deadlines_;
  std::set<PackageId> negotiating_;
  int pair_cycle_ = -1;
  std::set<std::pair<AgentId, AgentId>> pairs_this_cycle_;
};

std::string_view to_string(Performative p);
std::string_view to_string(ConversationState s);

}  // namespace emotrust::protocol
