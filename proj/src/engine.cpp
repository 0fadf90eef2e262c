#include "deltanet/engine.hpp"

#include <algorithm>
#include <exception>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

namespace deltanet {

void ReductionStats::record(RuleClass rule) {
  ++counts[static_cast<std::size_t>(rule)];
  if (is_interaction(rule)) {
    ++total_interactions;
  } else {
    ++total_canonicalizations;
  }
  ++steps;
}

void ReductionStats::merge(const ReductionStats& other) {
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  total_interactions += other.total_interactions;
  total_canonicalizations += other.total_canonicalizations;
  steps += other.steps;
  peak_live_agents = std::max(peak_live_agents, other.peak_live_agents);
}

std::string ReductionStats::to_json() const {
  nlohmann::ordered_json rules = nlohmann::ordered_json::object();
  for (RuleClass r : kAllRuleClasses) rules[std::string(rule_name(r))] = count(r);
  nlohmann::ordered_json j;
  j["steps"] = steps;
  j["total_interactions"] = total_interactions;
  j["total_canonicalizations"] = total_canonicalizations;
  j["peak_live_agents"] = peak_live_agents;
  j["rules"] = std::move(rules);
  return j.dump();
}

std::string_view status_name(Status status) {
  switch (status) {
    case Status::Normal: return "Normal";
    case Status::StepLimit: return "StepLimit";
    case Status::AgentLimit: return "AgentLimit";
  }
  return "?";
}

std::string format_trace(const TraceEvent& event) {
  std::ostringstream os;
  os << "step=" << event.step << " rule=" << rule_name(event.op.rule) << " agents=" << event.live_agents
     << " at=" << event.op.a << "," << event.op.b;
  return os.str();
}

namespace {

enum Bucket : std::size_t {
  kEraserAnn,
  kFreeVarErasure,
  kFanAnn,
  kRepAnn,
  kFanErasure,
  kRepErasure,
  kFanDecay,
  kCompleteDecay,
  kCommute0,
  kCommute1,
  kCommute2,
  kAuxFan,
  kMerge,
  kPartialDecay,
  kBucketCount,
};

using Key = std::pair<NodeId, NodeId>;

}  // namespace

struct Engine::Impl {
  Net& net;
  EngineOptions options;
  ReductionStats stats;
  std::array<std::set<Key>, kBucketCount> buckets;
  std::mt19937_64 rng;
  // Set by schedule() when it hands out a group-4 operation, which fires
  // without the unpaired checks.
  std::optional<Operation> final_phase_op;

  Impl(Net& n, EngineOptions opts) : net(n), options(std::move(opts)), rng(options.seed.value_or(0)) {
    stats.peak_live_agents = net.live_agents();
    for (NodeId id : net.ids()) index(id);
  }

  bool is(NodeId id, NodeKind k) const { return net.contains(id) && net.kind(id) == k; }
  bool is_at(PortRef p, NodeKind k, std::uint32_t slot) const {
    return p.valid() && is(p.node, k) && p.slot == slot;
  }

  std::optional<Bucket> pair_bucket(NodeId x, NodeId y) const {
    const Node& a = net.node(x);
    const Node& b = net.node(y);
    if (a.kind == b.kind) {
      if (a.kind == NodeKind::Fan) return kFanAnn;
      if (a.kind == NodeKind::Eraser) return kEraserAnn;
      if (a.level == b.level) return kRepAnn;
    } else if (a.kind == NodeKind::Eraser || b.kind == NodeKind::Eraser) {
      return (a.kind == NodeKind::Fan || b.kind == NodeKind::Fan) ? kFanErasure : kRepErasure;
    }
    const int tier = (a.kind == NodeKind::Replicator && a.unpaired) + (b.kind == NodeKind::Replicator && b.unpaired);
    return static_cast<Bucket>(kCommute0 + tier);
  }

  bool merge_fits(NodeId a, NodeId b) const {
    return !options.binary_replicators || net.node(a).arity() - 1 + net.node(b).arity() <= 2;
  }

  bool valid(Bucket bucket, Key k) const {
    const auto [x, y] = k;
    if (!net.contains(x) || !net.contains(y)) return false;
    switch (bucket) {
      case kFreeVarErasure:
        return is(x, NodeKind::Eraser) && net.peer({x, 0}) == PortRef{y, 0} && is(y, NodeKind::FreeVar);
      case kFanDecay:
        return is(x, NodeKind::Fan) && is(y, NodeKind::Eraser) && net.peer({y, 0}) == PortRef{x, 1};
      case kCompleteDecay:
        return replicator_decay_kind(net, x, true) == DecayKind::Complete;
      case kPartialDecay: {
        const DecayKind d = replicator_decay_kind(net, x, true);
        return d == DecayKind::Partial || d == DecayKind::Wire;
      }
      case kAuxFan:
        return is(x, NodeKind::Replicator) && is(y, NodeKind::Fan) && net.peer({x, 0}) == PortRef{y, 1};
      case kMerge: {
        if (x == y || !is(x, NodeKind::Replicator) || !is(y, NodeKind::Replicator)) return false;
        const PortRef p = net.peer({y, 0});
        return p.node == x && p.slot >= 1 && merge_fits(x, y);
      }
      default: {
        if (x == y || !net.node(x).is_agent() || !net.node(y).is_agent()) return false;
        if (net.peer({x, 0}) != PortRef{y, 0}) return false;
        return pair_bucket(x, y) == bucket;
      }
    }
  }

  void add(Bucket b, NodeId x, NodeId y) { buckets[b].insert({x, y}); }

  void index_replicator(NodeId r) {
    const Node& n = net.node(r);
    const PortRef up = net.peer({r, 0});
    if (is_at(up, NodeKind::Fan, 1)) add(kAuxFan, r, up.node);
    if (up.valid() && up.slot >= 1 && is(up.node, NodeKind::Replicator) && up.node != r) add(kMerge, up.node, r);
    for (std::uint32_t s = 1; s <= n.arity(); ++s) {
      const PortRef p = net.peer({r, s});
      if (is_at(p, NodeKind::Replicator, 0) && p.node != r) add(kMerge, r, p.node);
    }
    switch (replicator_decay_kind(net, r, true)) {
      case DecayKind::Complete: add(kCompleteDecay, r, r); break;
      case DecayKind::Partial:
      case DecayKind::Wire: add(kPartialDecay, r, r); break;
      case DecayKind::None: break;
    }
  }

  void index(NodeId id) {
    if (!net.contains(id)) return;
    const Node& n = net.node(id);
    if (!n.is_agent()) return;
    const PortRef p = net.peer({id, 0});
    if (!p.valid()) return;
    if (p.slot == 0 && p.node != id && net.node(p.node).is_agent()) {
      if (auto b = pair_bucket(id, p.node)) add(*b, std::min(id, p.node), std::max(id, p.node));
    }
    switch (n.kind) {
      case NodeKind::Eraser:
        if (is_at(p, NodeKind::FreeVar, 0)) add(kFreeVarErasure, id, p.node);
        if (is_at(p, NodeKind::Fan, 1)) add(kFanDecay, p.node, id);
        if (p.slot >= 1 && is(p.node, NodeKind::Replicator)) index_replicator(p.node);
        break;
      case NodeKind::Fan: {
        const PortRef a1 = net.peer({id, 1});
        if (is_at(a1, NodeKind::Eraser, 0)) add(kFanDecay, id, a1.node);
        if (is_at(a1, NodeKind::Replicator, 0)) add(kAuxFan, a1.node, id);
        break;
      }
      case NodeKind::Replicator:
        index_replicator(id);
        break;
      default:
        break;
    }
  }

  // Smallest valid entry, dropping stale ones on the way.
  std::optional<Key> first_valid(Bucket b) {
    auto& set = buckets[b];
    while (!set.empty()) {
      const Key k = *set.begin();
      if (valid(b, k)) return k;
      set.erase(set.begin());
    }
    return std::nullopt;
  }

  bool any(Bucket b) { return first_valid(b).has_value(); }

  // Deterministic: first bucket with a valid entry, smallest key. Seeded:
  // uniform over every valid entry in the given buckets.
  std::optional<std::pair<Bucket, Key>> pick(std::initializer_list<Bucket> from) {
    if (!options.seed) {
      for (Bucket b : from) {
        if (auto k = first_valid(b)) return std::make_pair(b, *k);
      }
      return std::nullopt;
    }
    std::vector<std::pair<Bucket, Key>> all;
    for (Bucket b : from) {
      auto& set = buckets[b];
      for (auto it = set.begin(); it != set.end();) {
        if (valid(b, *it)) {
          all.emplace_back(b, *it);
          ++it;
        } else {
          it = set.erase(it);
        }
      }
    }
    if (all.empty()) return std::nullopt;
    std::uniform_int_distribution<std::size_t> dist(0, all.size() - 1);
    return all[dist(rng)];
  }

  RuleClass pair_rule(Bucket b, Key k) const {
    switch (b) {
      case kEraserAnn: return RuleClass::EraserAnnihilation;
      case kFreeVarErasure: return RuleClass::FreeVarErasure;
      case kFanAnn: return RuleClass::FanAnnihilation;
      case kRepAnn: return RuleClass::ReplicatorAnnihilation;
      case kFanErasure: return RuleClass::FanErasure;
      case kRepErasure: return RuleClass::ReplicatorErasure;
      case kFanDecay: return RuleClass::FanDecay;
      case kCompleteDecay: return RuleClass::CompleteReplicatorDecay;
      case kAuxFan: return RuleClass::AuxFanReplication;
      case kMerge: return RuleClass::UnpairedMerge;
      case kPartialDecay: return RuleClass::PartialUnpairedDecay;
      default:
        return net.kind(k.first) == NodeKind::Fan || net.kind(k.second) == NodeKind::Fan
                   ? RuleClass::FanReplication
                   : RuleClass::ReplicatorReplication;
    }
  }

  // Pending canonicalization of an unpaired replicator before it commutes.
  std::optional<Operation> lazy_for(NodeId r) const {
    if (!is(r, NodeKind::Replicator) || !net.node(r).unpaired) return std::nullopt;
    const Node& n = net.node(r);
    for (std::uint32_t s = 1; s <= n.arity(); ++s) {
      const PortRef p = net.peer({r, s});
      if (!is_at(p, NodeKind::Replicator, 0) || p.node == r) continue;
      const std::int64_t gap = static_cast<std::int64_t>(net.node(p.node).level) - static_cast<std::int64_t>(n.level);
      if (gap >= 0 && gap <= n.deltas[s - 1] && merge_fits(r, p.node)) {
        return Operation{RuleClass::UnpairedMerge, r, p.node};
      }
    }
    const DecayKind d = replicator_decay_kind(net, r);
    if (d == DecayKind::Partial || d == DecayKind::Wire) return Operation{RuleClass::PartialUnpairedDecay, r, r};
    return std::nullopt;
  }

  std::optional<Operation> schedule() {
    final_phase_op.reset();
    auto as_op = [&](const std::pair<Bucket, Key>& hit) {
      return Operation{pair_rule(hit.first, hit.second), hit.second.first, hit.second.second};
    };
    if (auto hit = pick({kEraserAnn, kFreeVarErasure})) return as_op(*hit);

    {
      const bool fan_ann = any(kFanAnn);
      const bool rep_ann = any(kRepAnn);
      std::optional<std::pair<Bucket, Key>> hit;
      if (!fan_ann && !rep_ann) {
        hit = pick({kFanAnn, kRepAnn, kFanErasure, kRepErasure, kFanDecay, kCompleteDecay});
      } else if (!fan_ann) {
        hit = pick({kFanAnn, kRepAnn, kFanErasure, kRepErasure, kFanDecay});
      } else if (!rep_ann) {
        hit = pick({kFanAnn, kRepAnn, kFanErasure, kRepErasure, kCompleteDecay});
      } else {
        hit = pick({kFanAnn, kRepAnn, kFanErasure, kRepErasure});
      }
      if (hit) return as_op(*hit);
    }

    for (Bucket tier : {kCommute0, kCommute1, kCommute2}) {
      if (auto hit = pick({tier})) {
        for (NodeId r : {hit->second.first, hit->second.second}) {
          if (auto lazy = lazy_for(r)) return lazy;
        }
        return as_op(*hit);
      }
    }

    if (auto hit = pick({kAuxFan})) {
      if (auto lazy = lazy_for(hit->second.first)) return lazy;
      return as_op(*hit);
    }

    if (auto hit = pick({kMerge, kPartialDecay})) {
      final_phase_op = as_op(*hit);
      return final_phase_op;
    }
    return std::nullopt;
  }

  RewriteResult fire(const Operation& op) {
    const bool final_phase = final_phase_op && *final_phase_op == op;
    const ActivePair pair{op.a, op.b};
    switch (op.rule) {
      case RuleClass::EraserAnnihilation:
      case RuleClass::FanAnnihilation:
        return fire_annihilation(net, pair);
      case RuleClass::ReplicatorAnnihilation:
      case RuleClass::ReplicatorReplication:
        if (classify_pair(net, pair, options.check_equality) == RuleClass::ReplicatorReplication) {
          return fire_replicator_replication(net, pair);
        }
        return fire_annihilation(net, pair);
      case RuleClass::FanErasure:
      case RuleClass::ReplicatorErasure:
        return fire_erasure(net, pair);
      case RuleClass::FanReplication:
        return fire_fan_replication(net, pair);
      case RuleClass::FreeVarErasure:
        return fire_free_var_erasure(net, op.a);
      case RuleClass::FanDecay:
        return fire_fan_decay(net, op.b);
      case RuleClass::CompleteReplicatorDecay:
      case RuleClass::PartialUnpairedDecay:
        return fire_replicator_decay(net, op.a, final_phase);
      case RuleClass::AuxFanReplication:
        return fire_aux_fan_replication(net, op.a);
      case RuleClass::UnpairedMerge: {
        const PortRef p = net.peer({op.b, 0});
        if (p.node != op.a) throw EngineError(EngineErrc::NotApplicable, "merge target moved");
        RewriteResult result;
        const MergePolicy policy = final_phase ? MergePolicy::Unconditional : MergePolicy::Constrained;
        if (!merge_unpaired(net, op.a, p.slot, policy, &result)) {
          throw EngineError(EngineErrc::NotApplicable, "merge constraint does not hold");
        }
        return result;
      }
    }
    throw EngineError(EngineErrc::NotApplicable, "unknown rule");
  }

  void apply(const Operation& op) {
    RewriteResult result = fire(op);
    final_phase_op.reset();
    stats.record(op.rule);
    stats.peak_live_agents = std::max<std::uint64_t>(stats.peak_live_agents, net.live_agents());
    for (NodeId id : result.created) index(id);
    for (NodeId id : result.touched) index(id);
    if (options.on_step) options.on_step(TraceEvent{stats.steps, op, net.live_agents(), &net});
  }

  // Pair rules that may fire side by side within one round.
  static bool batchable(RuleClass r) {
    switch (r) {
      case RuleClass::EraserAnnihilation:
      case RuleClass::FanAnnihilation:
      case RuleClass::ReplicatorAnnihilation:
      case RuleClass::FanErasure:
      case RuleClass::ReplicatorErasure:
      case RuleClass::FanReplication:
      case RuleClass::ReplicatorReplication: return true;
      default: return false;
    }
  }

  std::size_t fresh_nodes(const Operation& op) const {
    const Node& a = net.node(op.a);
    const Node& b = net.node(op.b);
    switch (op.rule) {
      case RuleClass::FanErasure:
      case RuleClass::ReplicatorErasure: return a.arity() + b.arity();
      case RuleClass::FanReplication: return 2 + (a.kind == NodeKind::Replicator ? a.arity() : b.arity());
      case RuleClass::ReplicatorReplication: return a.arity() + b.arity();
      default: return 0;
    }
  }

  // Every pair enabled alongside `first`, claimed greedily in key order. A
  // pair is admitted only if none of its aux wires leads into an agent of a
  // pair already admitted, so concurrent rewrites write disjoint ports.
  std::vector<Operation> claim_round(const Operation& first, std::uint64_t budget) {
    std::vector<Bucket> from;
    if (rule_group(first.rule) <= 1) {
      from = {kEraserAnn, kFanAnn, kRepAnn, kFanErasure, kRepErasure};
    } else {
      from = {pair_bucket(first.a, first.b).value()};
    }
    std::vector<Operation> round;
    std::set<NodeId> claimed;
    for (Bucket b : from) {
      for (const Key& k : buckets[b]) {
        if (round.size() >= budget) break;
        if (!valid(b, k)) continue;
        if (b >= kCommute0 && (lazy_for(k.first) || lazy_for(k.second))) continue;
        bool free = !claimed.count(k.first) && !claimed.count(k.second);
        for (NodeId id : {k.first, k.second}) {
          for (std::uint32_t s = 1; free && s < net.port_count(id); ++s) {
            const NodeId other = net.peer({id, s}).node;
            free = !claimed.count(other);
          }
        }
        if (!free) continue;
        claimed.insert(k.first);
        claimed.insert(k.second);
        round.push_back(Operation{pair_rule(b, k), k.first, k.second});
      }
    }
    return round;
  }

  std::uint64_t parallel_round(const std::vector<Operation>& round) {
    std::vector<NodeId> first_id(round.size());
    std::vector<std::size_t> count(round.size());
    std::size_t total = 0;
    for (std::size_t i = 0; i < round.size(); ++i) {
      count[i] = fresh_nodes(round[i]);
      total += count[i];
    }
    NodeId next = net.reserve_ids(total);
    for (std::size_t i = 0; i < round.size(); ++i) {
      first_id[i] = next;
      next += static_cast<NodeId>(count[i]);
    }

    std::vector<RewriteResult> results(round.size());
    std::vector<std::exception_ptr> errors(round.size());
    const std::size_t workers = std::min<std::size_t>(options.workers, round.size());
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < round.size(); i += workers) {
            try {
              Net::IdBlock block(net, first_id[i], count[i]);
              results[i] = fire(round[i]);
            } catch (...) {
              errors[i] = std::current_exception();
            }
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (std::size_t i = 0; i < round.size(); ++i) {
      stats.record(round[i].rule);
      for (NodeId id : results[i].created) index(id);
      for (NodeId id : results[i].touched) index(id);
      if (options.on_step) options.on_step(TraceEvent{stats.steps, round[i], net.live_agents(), &net});
    }
    stats.peak_live_agents = std::max<std::uint64_t>(stats.peak_live_agents, net.live_agents());
    return round.size();
  }

  std::uint64_t advance(std::uint64_t budget) {
    if (budget == 0) return 0;
    const auto op = schedule();
    if (!op) return 0;
    if (options.workers > 1 && budget > 1 && batchable(op->rule) && !final_phase_op) {
      std::vector<Operation> round = claim_round(*op, budget);
      if (round.size() > 1) return parallel_round(round);
    }
    apply(*op);
    return 1;
  }
};

Engine::Engine(Net& net, EngineOptions options) : impl_(std::make_unique<Impl>(net, std::move(options))) {}
Engine::~Engine() = default;

std::optional<Operation> Engine::schedule() { return impl_->schedule(); }
void Engine::apply(const Operation& op) { impl_->apply(op); }

bool Engine::step() {
  const auto op = schedule();
  if (!op) return false;
  apply(*op);
  return true;
}

std::uint64_t Engine::advance(std::uint64_t max_operations) { return impl_->advance(max_operations); }

const ReductionStats& Engine::stats() const { return impl_->stats; }
const Net& Engine::net() const { return impl_->net; }

NormalizeResult normalize(Net net, const Limits& limits, const EngineOptions& options) {
  NormalizeResult out;
  {
    Engine engine(net, options);
    out.status = Status::Normal;
    for (;;) {
      const std::uint64_t done = engine.stats().steps;
      if (done >= limits.max_steps) {
        if (engine.schedule()) out.status = Status::StepLimit;
        break;
      }
      if (engine.advance(limits.max_steps - done) == 0) break;
      if (net.live_agents() > limits.max_agents) {
        out.status = Status::AgentLimit;
        break;
      }
    }
    out.stats = engine.stats();
  }
  if (out.status == Status::Normal) {
    for (NodeId id : net.ids()) {
      if (net.kind(id) == NodeKind::Replicator) net.node_mut(id).unpaired = true;
    }
  }
  out.net = std::move(net);
  return out;
}

}  // namespace deltanet
