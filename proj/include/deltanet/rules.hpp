#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "deltanet/net.hpp"

namespace deltanet {

enum class RuleClass : std::uint8_t {
  EraserAnnihilation,
  FreeVarErasure,
  FanAnnihilation,
  ReplicatorAnnihilation,
  FanErasure,
  ReplicatorErasure,
  FanDecay,
  CompleteReplicatorDecay,
  FanReplication,
  ReplicatorReplication,
  AuxFanReplication,
  UnpairedMerge,
  PartialUnpairedDecay,
};

inline constexpr std::size_t kRuleClassCount = 13;
inline constexpr std::array<RuleClass, kRuleClassCount> kAllRuleClasses = {
    RuleClass::EraserAnnihilation,     RuleClass::FreeVarErasure,        RuleClass::FanAnnihilation,
    RuleClass::ReplicatorAnnihilation, RuleClass::FanErasure,            RuleClass::ReplicatorErasure,
    RuleClass::FanDecay,               RuleClass::CompleteReplicatorDecay, RuleClass::FanReplication,
    RuleClass::ReplicatorReplication,  RuleClass::AuxFanReplication,     RuleClass::UnpairedMerge,
    RuleClass::PartialUnpairedDecay,
};

std::string_view rule_name(RuleClass rule);
/// Position in the reduction order: 0 (any time) through 4 (last).
int rule_group(RuleClass rule);
/// Core interaction rules, as opposed to canonicalization rules.
bool is_interaction(RuleClass rule);

enum class EngineErrc : std::uint8_t { NegativeLevel, DebugEqualityViolation, NotApplicable };

class EngineError : public std::runtime_error {
 public:
  EngineError(EngineErrc code, const std::string& detail);
  EngineErrc code() const { return code_; }

 private:
  EngineErrc code_;
};

/// Nodes a rewrite created, plus surviving nodes whose ports were rewired.
struct RewriteResult {
  std::vector<NodeId> created;
  std::vector<NodeId> touched;
};

/// Rule for an active pair. With `check_equality`, equal-level replicators
/// whose arity or deltas differ raise DebugEqualityViolation.
RuleClass classify_pair(const Net& net, ActivePair pair, bool check_equality = true);

// Each fire_* function asserts its precondition and throws
// EngineError(NotApplicable) if it does not hold.

/// Fan–fan, replicator–replicator (aux i to aux i) or eraser–eraser.
RewriteResult fire_annihilation(Net& net, ActivePair pair);
/// An eraser against a fan or replicator: one fresh eraser per aux wire.
RewriteResult fire_erasure(Net& net, ActivePair pair);
RewriteResult fire_fan_replication(Net& net, ActivePair pair);
/// The lower-level replicator replicates the higher one, shifting each
/// replica's level by the delta of the port it leaves through.
RewriteResult fire_replicator_replication(Net& net, ActivePair pair);
/// `eraser` sits on aux port 1 of a fan.
RewriteResult fire_fan_decay(Net& net, NodeId eraser);
/// `eraser` sits on a free-variable node.
RewriteResult fire_free_var_erasure(Net& net, NodeId eraser);

enum class MergePolicy : std::uint8_t {
  /// Requires `a` unpaired and 0 <= l_B - l_A <= d.
  Constrained,
  /// Skips both checks; the scheduler's final merge pass uses it.
  Unconditional,
};

/// Merges replicator B, whose principal port sits on aux `slot` of `a`, into
/// `a` in place. B's deltas become d + b_j. Returns false and leaves the
/// net unchanged when the policy forbids the merge or `slot` does not lead
/// to a replicator's principal port.
bool merge_unpaired(Net& net, NodeId a, std::uint32_t slot, MergePolicy policy = MergePolicy::Constrained,
                    RewriteResult* result = nullptr);

enum class DecayKind : std::uint8_t { None, Complete, Partial, Wire };

/// What fire_replicator_decay would do to `r` now. Partial decay (and the
/// single zero-delta residue collapse) apply only to unpaired replicators
/// unless `assume_unpaired`.
DecayKind replicator_decay_kind(const Net& net, NodeId r, bool assume_unpaired = false);

/// Complete decay when every aux port meets an eraser; otherwise removes the
/// eraser-facing aux ports of an unpaired replicator, collapsing a single
/// zero-delta residue to a wire.
RewriteResult fire_replicator_decay(Net& net, NodeId r, bool assume_unpaired = false);

/// Replicator `r` has its principal port on aux port 1 of a fan: the fan is
/// commuted through `r` as if that aux port were its principal.
RewriteResult fire_aux_fan_replication(Net& net, NodeId r);

}  // namespace deltanet
