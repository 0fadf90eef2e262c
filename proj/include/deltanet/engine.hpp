#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "deltanet/net.hpp"
#include "deltanet/rules.hpp"

namespace deltanet {

struct ReductionStats {
  std::array<std::uint64_t, kRuleClassCount> counts{};
  std::uint64_t total_interactions = 0;
  std::uint64_t total_canonicalizations = 0;
  std::uint64_t peak_live_agents = 0;
  std::uint64_t steps = 0;

  std::uint64_t count(RuleClass rule) const { return counts[static_cast<std::size_t>(rule)]; }
  void record(RuleClass rule);
  /// Adds another run's counters; peaks combine by maximum.
  void merge(const ReductionStats& other);
  std::string to_json() const;

  friend bool operator==(const ReductionStats&, const ReductionStats&) = default;
};

struct Limits {
  std::uint64_t max_steps = 1'000'000;
  std::uint64_t max_agents = 10'000'000;
};

enum class Status : std::uint8_t { Normal, StepLimit, AgentLimit };

std::string_view status_name(Status status);

/// A scheduled rewrite. For pairs, `a` and `b` are the two agents. For
/// single-site rules the fields are: FreeVarErasure (eraser, freevar),
/// FanDecay (fan, eraser), CompleteReplicatorDecay and PartialUnpairedDecay
/// (replicator, replicator), AuxFanReplication (replicator, fan),
/// UnpairedMerge (A, B) with B's principal on an aux port of A.
struct Operation {
  RuleClass rule;
  NodeId a;
  NodeId b;
  friend bool operator==(const Operation&, const Operation&) = default;
};

struct TraceEvent {
  std::uint64_t step;
  Operation op;
  std::uint64_t live_agents;
  /// The net right after the step.
  const Net* net = nullptr;
};

/// `step=<n> rule=<RuleClass> agents=<live> at=<a>,<b>`
std::string format_trace(const TraceEvent& event);

struct EngineOptions {
  /// Ties break by ascending node id when unset, by a seeded shuffle otherwise.
  std::optional<std::uint64_t> seed;
  /// Refuse merges that would leave a replicator with more than two aux ports.
  bool binary_replicators = false;
  /// Assert that equal-level interacting replicators are equal.
  bool check_equality = true;
  /// Worker threads for group 1 and 2 rounds; 1 is sequential.
  unsigned workers = 1;
  std::function<void(const TraceEvent&)> on_step;
};

/// Drives one net to canonical form. The net is borrowed for the engine's
/// lifetime and must not be modified behind its back.
class Engine {
 public:
  Engine(Net& net, EngineOptions options = {});
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Next operation according to the reduction order, or none when the net
  /// is canonical.
  std::optional<Operation> schedule();
  /// Fires a scheduled operation. Throws EngineError (NegativeLevel,
  /// DebugEqualityViolation) from the rules.
  void apply(const Operation& op);
  /// schedule() then apply(); false when nothing applies.
  bool step();
  /// Fires up to `max_operations` operations: one, or with several workers a
  /// round of independent annihilations, erasures or commutations claimed
  /// together. Returns how many fired; 0 when the net is canonical.
  std::uint64_t advance(std::uint64_t max_operations);

  const ReductionStats& stats() const;
  const Net& net() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct NormalizeResult {
  Net net;
  ReductionStats stats;
  Status status = Status::Normal;
};

/// Reduces to canonical form or until a limit is reached. On Normal every
/// remaining replicator is marked unpaired. NegativeLevel and
/// DebugEqualityViolation propagate as EngineError.
NormalizeResult normalize(Net net, const Limits& limits = {}, const EngineOptions& options = {});

}  // namespace deltanet
