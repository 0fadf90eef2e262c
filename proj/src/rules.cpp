#include "deltanet/rules.hpp"

#include <algorithm>
#include <map>

namespace deltanet {

std::string_view rule_name(RuleClass rule) {
  switch (rule) {
    case RuleClass::EraserAnnihilation: return "EraserAnnihilation";
    case RuleClass::FreeVarErasure: return "FreeVarErasure";
    case RuleClass::FanAnnihilation: return "FanAnnihilation";
    case RuleClass::ReplicatorAnnihilation: return "ReplicatorAnnihilation";
    case RuleClass::FanErasure: return "FanErasure";
    case RuleClass::ReplicatorErasure: return "ReplicatorErasure";
    case RuleClass::FanDecay: return "FanDecay";
    case RuleClass::CompleteReplicatorDecay: return "CompleteReplicatorDecay";
    case RuleClass::FanReplication: return "FanReplication";
    case RuleClass::ReplicatorReplication: return "ReplicatorReplication";
    case RuleClass::AuxFanReplication: return "AuxFanReplication";
    case RuleClass::UnpairedMerge: return "UnpairedMerge";
    case RuleClass::PartialUnpairedDecay: return "PartialUnpairedDecay";
  }
  return "?";
}

int rule_group(RuleClass rule) {
  switch (rule) {
    case RuleClass::EraserAnnihilation:
    case RuleClass::FreeVarErasure: return 0;
    case RuleClass::FanAnnihilation:
    case RuleClass::ReplicatorAnnihilation:
    case RuleClass::FanErasure:
    case RuleClass::ReplicatorErasure:
    case RuleClass::FanDecay:
    case RuleClass::CompleteReplicatorDecay: return 1;
    case RuleClass::FanReplication:
    case RuleClass::ReplicatorReplication: return 2;
    case RuleClass::AuxFanReplication: return 3;
    case RuleClass::UnpairedMerge:
    case RuleClass::PartialUnpairedDecay: return 4;
  }
  return 4;
}

bool is_interaction(RuleClass rule) {
  switch (rule) {
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

namespace {

std::string_view errc_text(EngineErrc code) {
  switch (code) {
    case EngineErrc::NegativeLevel: return "NegativeLevel";
    case EngineErrc::DebugEqualityViolation: return "DebugEqualityViolation";
    case EngineErrc::NotApplicable: return "NotApplicable";
  }
  return "?";
}

}  // namespace

EngineError::EngineError(EngineErrc code, const std::string& detail)
    : std::runtime_error(std::string(errc_text(code)) + ": " + detail), code_(code) {}

namespace {

[[noreturn]] void not_applicable(const std::string& what) { throw EngineError(EngineErrc::NotApplicable, what); }

std::uint32_t aux(std::size_t i) { return static_cast<std::uint32_t>(i + 1); }

bool is_kind_at(const Net& net, PortRef p, NodeKind kind, std::uint32_t slot) {
  return p.valid() && net.contains(p.node) && net.kind(p.node) == kind && p.slot == slot;
}

void require_pair(const Net& net, ActivePair pair) {
  if (!net.contains(pair.a) || !net.contains(pair.b) || pair.a == pair.b) not_applicable("not two live nodes");
  if (!net.node(pair.a).is_agent() || !net.node(pair.b).is_agent()) not_applicable("not two agents");
  if (net.peer({pair.a, 0}) != PortRef{pair.b, 0}) not_applicable("not an active pair");
}

// Rewires the outside of a doomed region. Every boundary port on a doomed
// node has its current wire redirected either to a fresh port or, when two
// boundary wires are simply joined, to another boundary entry. Wires that
// run between two boundary ports of the doomed region are followed until
// they reach an outside or fresh endpoint.
class Splice {
 public:
  explicit Splice(Net& net) : net_(net) {}

  void doom(NodeId id) { doomed_.push_back(id); }
  void to_fresh(PortRef boundary, PortRef fresh) { entries_.push_back({boundary, fresh, -1}); }
  void join(PortRef a, PortRef b) {
    const int ia = static_cast<int>(entries_.size());
    entries_.push_back({a, {}, ia + 1});
    entries_.push_back({b, {}, ia});
  }

  RewriteResult apply(std::vector<NodeId> created) {
    const std::size_t m = entries_.size();
    std::vector<PortRef> ext(m);
    std::vector<int> ext_index(m, -1);
    for (std::size_t k = 0; k < m; ++k) ext[k] = net_.peer(entries_[k].boundary);
    for (std::size_t k = 0; k < m; ++k) {
      if (!is_doomed(ext[k].node)) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (entries_[j].boundary == ext[k]) ext_index[k] = static_cast<int>(j);
      }
      if (ext_index[k] < 0) not_applicable("wire into the rewritten region is not on its boundary");
    }

    RewriteResult result;
    result.created = std::move(created);
    std::vector<bool> visited(m, false);
    auto note = [&](PortRef p) {
      if (!is_doomed(p.node) && std::find(result.created.begin(), result.created.end(), p.node) == result.created.end()) {
        result.touched.push_back(p.node);
      }
    };
    auto walk = [&](PortRef from, std::size_t k, bool via_ext) {
      std::size_t cur = k;
      for (;;) {
        visited[cur] = true;
        if (via_ext) {
          const Entry& e = entries_[cur];
          if (e.other < 0) {
            net_.link(from, e.fresh);
            note(from);
            return;
          }
          cur = static_cast<std::size_t>(e.other);
          via_ext = false;
        } else {
          if (ext_index[cur] < 0) {
            net_.link(from, ext[cur]);
            note(from);
            note(ext[cur]);
            return;
          }
          cur = static_cast<std::size_t>(ext_index[cur]);
          via_ext = true;
        }
      }
    };
    for (std::size_t k = 0; k < m; ++k) {
      if (!visited[k] && ext_index[k] < 0) walk(ext[k], k, true);
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (!visited[k] && entries_[k].other < 0) walk(entries_[k].fresh, k, false);
    }
    // Anything still unvisited forms a closed loop through the region and vanishes.
    for (NodeId id : doomed_) net_.remove(id);
    std::sort(result.touched.begin(), result.touched.end());
    result.touched.erase(std::unique(result.touched.begin(), result.touched.end()), result.touched.end());
    return result;
  }

 private:
  struct Entry {
    PortRef boundary;
    PortRef fresh;
    int other;
  };

  bool is_doomed(NodeId id) const { return std::find(doomed_.begin(), doomed_.end(), id) != doomed_.end(); }

  Net& net_;
  std::vector<NodeId> doomed_;
  std::vector<Entry> entries_;
};

// Node whose aux ports come from old ports of a set of nodes being folded
// into it. Rebuilds `target` in place from `sources` (new aux slot q+1 takes
// over the wire of sources[q]); the principal wire is kept.
void rebuild_in_place(Net& net, NodeId target, std::vector<std::int32_t> deltas, const std::vector<PortRef>& sources,
                      const std::vector<NodeId>& absorbed, RewriteResult* result) {
  std::map<PortRef, std::uint32_t> new_slot;
  for (std::size_t q = 0; q < sources.size(); ++q) new_slot[sources[q]] = aux(q);
  std::vector<PortRef> ext(sources.size());
  for (std::size_t q = 0; q < sources.size(); ++q) ext[q] = net.peer(sources[q]);
  const PortRef principal = net.peer({target, 0});

  net.reshape_replicator(target, std::move(deltas));
  for (NodeId id : absorbed) net.remove(id);
  if (principal.node == target) {
    // Principal wired to one of the target's own old aux ports.
    auto it = new_slot.find(principal);
    if (it == new_slot.end()) not_applicable("replicator principal loops onto a removed port");
  }
  // Reattach the principal (reshape cleared all peers).
  {
    PortRef p = principal;
    if (p.node == target) p = {target, new_slot.at(principal)};
    net.link({target, 0}, p);
    if (result && p.node != target) result->touched.push_back(p.node);
  }
  for (std::size_t q = 0; q < sources.size(); ++q) {
    PortRef e = ext[q];
    if (auto it = new_slot.find(e); it != new_slot.end()) {
      e = {target, it->second};
    } else if (e == PortRef{target, 0}) {
      continue;  // already linked above
    }
    net.link({target, aux(q)}, e);
    if (result && e.node != target) result->touched.push_back(e.node);
  }
}

}  // namespace

RuleClass classify_pair(const Net& net, ActivePair pair, bool check_equality) {
  require_pair(net, pair);
  const Node& a = net.node(pair.a);
  const Node& b = net.node(pair.b);
  if (a.kind == b.kind) {
    switch (a.kind) {
      case NodeKind::Fan: return RuleClass::FanAnnihilation;
      case NodeKind::Eraser: return RuleClass::EraserAnnihilation;
      case NodeKind::Replicator:
        if (a.level != b.level) return RuleClass::ReplicatorReplication;
        if (check_equality && a.deltas != b.deltas) {
          throw EngineError(EngineErrc::DebugEqualityViolation,
                            "replicators " + std::to_string(pair.a) + " and " + std::to_string(pair.b) +
                                " share level " + std::to_string(a.level) + " but differ in deltas");
        }
        return RuleClass::ReplicatorAnnihilation;
      default: break;
    }
  }
  auto has = [&](NodeKind k) { return a.kind == k || b.kind == k; };
  if (has(NodeKind::Eraser)) return has(NodeKind::Fan) ? RuleClass::FanErasure : RuleClass::ReplicatorErasure;
  return RuleClass::FanReplication;
}

RewriteResult fire_annihilation(Net& net, ActivePair pair) {
  require_pair(net, pair);
  const Node& a = net.node(pair.a);
  const Node& b = net.node(pair.b);
  if (a.kind != b.kind) not_applicable("annihilation needs agents of one kind");
  if (a.arity() != b.arity()) {
    throw EngineError(EngineErrc::DebugEqualityViolation, "annihilating agents differ in arity");
  }
  Splice s(net);
  s.doom(pair.a);
  s.doom(pair.b);
  for (std::size_t i = 0; i < a.arity(); ++i) s.join({pair.a, aux(i)}, {pair.b, aux(i)});
  return s.apply({});
}

RewriteResult fire_erasure(Net& net, ActivePair pair) {
  require_pair(net, pair);
  NodeId eraser = pair.a;
  NodeId victim = pair.b;
  if (net.kind(eraser) != NodeKind::Eraser) std::swap(eraser, victim);
  if (net.kind(eraser) != NodeKind::Eraser || net.kind(victim) == NodeKind::Eraser) {
    not_applicable("erasure needs exactly one eraser");
  }
  const std::size_t k = net.node(victim).arity();
  Splice s(net);
  s.doom(eraser);
  s.doom(victim);
  std::vector<NodeId> created;
  for (std::size_t i = 0; i < k; ++i) {
    const NodeId e = net.add(Node::eraser());
    created.push_back(e);
    s.to_fresh({victim, aux(i)}, {e, 0});
  }
  return s.apply(std::move(created));
}

RewriteResult fire_fan_replication(Net& net, ActivePair pair) {
  require_pair(net, pair);
  NodeId fan = pair.a;
  NodeId rep = pair.b;
  if (net.kind(fan) != NodeKind::Fan) std::swap(fan, rep);
  if (net.kind(fan) != NodeKind::Fan || net.kind(rep) != NodeKind::Replicator) {
    not_applicable("fan replication needs a fan and a replicator");
  }
  const Node r = net.node(rep);
  const std::string tag = net.node(fan).label;
  const std::size_t k = r.arity();

  Splice s(net);
  s.doom(fan);
  s.doom(rep);
  std::vector<NodeId> created;
  std::vector<NodeId> copies;
  for (int j = 0; j < 2; ++j) {
    const NodeId c = net.add(Node::replicator(r.level, r.deltas, false));
    copies.push_back(c);
    created.push_back(c);
    s.to_fresh({fan, aux(j)}, {c, 0});
  }
  for (std::size_t i = 0; i < k; ++i) {
    const NodeId f = net.add(Node::fan(tag));
    created.push_back(f);
    s.to_fresh({rep, aux(i)}, {f, 0});
    for (std::size_t j = 0; j < 2; ++j) net.link({copies[j], aux(i)}, {f, aux(j)});
  }
  return s.apply(std::move(created));
}

RewriteResult fire_replicator_replication(Net& net, ActivePair pair) {
  require_pair(net, pair);
  if (net.kind(pair.a) != NodeKind::Replicator || net.kind(pair.b) != NodeKind::Replicator) {
    not_applicable("replicator replication needs two replicators");
  }
  NodeId lo = pair.a;
  NodeId hi = pair.b;
  if (net.node(lo).level > net.node(hi).level) std::swap(lo, hi);
  const Node a = net.node(lo);
  const Node b = net.node(hi);
  if (a.level == b.level) not_applicable("replicators of equal level annihilate");
  for (std::int32_t d : a.deltas) {
    if (static_cast<std::int64_t>(b.level) + d < 0) {
      throw EngineError(EngineErrc::NegativeLevel, "replica of replicator " + std::to_string(hi) + " at level " +
                                                       std::to_string(b.level) + " shifted by " + std::to_string(d));
    }
  }

  Splice s(net);
  s.doom(lo);
  s.doom(hi);
  std::vector<NodeId> created;
  std::vector<NodeId> replicas;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    const auto level = static_cast<std::uint32_t>(static_cast<std::int64_t>(b.level) + a.deltas[i]);
    const NodeId c = net.add(Node::replicator(level, b.deltas, false));
    replicas.push_back(c);
    created.push_back(c);
    s.to_fresh({lo, aux(i)}, {c, 0});
  }
  for (std::size_t m = 0; m < b.arity(); ++m) {
    const NodeId c = net.add(Node::replicator(a.level, a.deltas, false));
    created.push_back(c);
    s.to_fresh({hi, aux(m)}, {c, 0});
    for (std::size_t i = 0; i < a.arity(); ++i) net.link({replicas[i], aux(m)}, {c, aux(i)});
  }
  return s.apply(std::move(created));
}

RewriteResult fire_fan_decay(Net& net, NodeId eraser) {
  if (!net.contains(eraser) || net.kind(eraser) != NodeKind::Eraser) not_applicable("fan decay needs an eraser");
  const PortRef at = net.peer({eraser, 0});
  if (!is_kind_at(net, at, NodeKind::Fan, 1)) not_applicable("eraser is not on a fan's first aux port");
  const NodeId fan = at.node;
  Splice s(net);
  s.doom(eraser);
  s.doom(fan);
  const NodeId e0 = net.add(Node::eraser());
  const NodeId e2 = net.add(Node::eraser());
  s.to_fresh({fan, 0}, {e0, 0});
  s.to_fresh({fan, 2}, {e2, 0});
  return s.apply({e0, e2});
}

RewriteResult fire_free_var_erasure(Net& net, NodeId eraser) {
  if (!net.contains(eraser) || net.kind(eraser) != NodeKind::Eraser) not_applicable("free-variable erasure needs an eraser");
  const PortRef at = net.peer({eraser, 0});
  if (!is_kind_at(net, at, NodeKind::FreeVar, 0)) not_applicable("eraser is not on a free variable");
  net.remove(at.node);
  net.remove(eraser);
  return {};
}

bool merge_unpaired(Net& net, NodeId a, std::uint32_t slot, MergePolicy policy, RewriteResult* result) {
  if (!net.contains(a) || net.kind(a) != NodeKind::Replicator) return false;
  const Node& ra = net.node(a);
  if (slot < 1 || slot > ra.arity()) return false;
  const PortRef at = net.peer({a, slot});
  if (!is_kind_at(net, at, NodeKind::Replicator, 0) || at.node == a) return false;
  const NodeId b = at.node;
  const Node& rb = net.node(b);
  const std::int32_t d = ra.deltas[slot - 1];
  if (policy == MergePolicy::Constrained) {
    const std::int64_t gap = static_cast<std::int64_t>(rb.level) - static_cast<std::int64_t>(ra.level);
    if (!ra.unpaired || gap < 0 || gap > d) return false;
  }

  std::vector<std::int32_t> deltas;
  std::vector<PortRef> sources;
  for (std::size_t k = 0; k < ra.arity(); ++k) {
    if (aux(k) != slot) {
      deltas.push_back(ra.deltas[k]);
      sources.push_back({a, aux(k)});
      continue;
    }
    for (std::size_t j = 0; j < rb.arity(); ++j) {
      deltas.push_back(d + rb.deltas[j]);
      sources.push_back({b, aux(j)});
    }
  }
  rebuild_in_place(net, a, std::move(deltas), sources, {b}, result);
  if (result) result->touched.push_back(a);
  return true;
}

DecayKind replicator_decay_kind(const Net& net, NodeId r, bool assume_unpaired) {
  if (!net.contains(r) || net.kind(r) != NodeKind::Replicator) return DecayKind::None;
  const Node& n = net.node(r);
  std::size_t erased = 0;
  for (std::size_t k = 0; k < n.arity(); ++k) {
    const PortRef p = net.peer({r, aux(k)});
    if (is_kind_at(net, p, NodeKind::Eraser, 0)) ++erased;
  }
  if (erased == n.arity()) return DecayKind::Complete;
  if (!n.unpaired && !assume_unpaired) return DecayKind::None;
  if (erased > 0) return DecayKind::Partial;
  if (n.arity() == 1 && n.deltas[0] == 0) return DecayKind::Wire;
  return DecayKind::None;
}

RewriteResult fire_replicator_decay(Net& net, NodeId r, bool assume_unpaired) {
  const DecayKind kind = replicator_decay_kind(net, r, assume_unpaired);
  if (kind == DecayKind::None) not_applicable("replicator " + std::to_string(r) + " cannot decay");
  const Node n = net.node(r);
  std::vector<NodeId> erasers;
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < n.arity(); ++k) {
    const PortRef p = net.peer({r, aux(k)});
    if (is_kind_at(net, p, NodeKind::Eraser, 0)) {
      erasers.push_back(p.node);
    } else {
      kept.push_back(k);
    }
  }

  if (kind == DecayKind::Complete) {
    Splice s(net);
    s.doom(r);
    for (NodeId e : erasers) s.doom(e);
    const NodeId fresh = net.add(Node::eraser());
    s.to_fresh({r, 0}, {fresh, 0});
    return s.apply({fresh});
  }
  if (kept.size() == 1 && n.deltas[kept[0]] == 0) {
    Splice s(net);
    s.doom(r);
    for (NodeId e : erasers) s.doom(e);
    s.join({r, 0}, {r, aux(kept[0])});
    return s.apply({});
  }
  std::vector<std::int32_t> deltas;
  std::vector<PortRef> sources;
  for (std::size_t k : kept) {
    deltas.push_back(n.deltas[k]);
    sources.push_back({r, aux(k)});
  }
  RewriteResult result;
  rebuild_in_place(net, r, std::move(deltas), sources, erasers, &result);
  result.touched.push_back(r);
  return result;
}

RewriteResult fire_aux_fan_replication(Net& net, NodeId r) {
  if (!net.contains(r) || net.kind(r) != NodeKind::Replicator) not_applicable("aux fan replication needs a replicator");
  const PortRef at = net.peer({r, 0});
  if (!is_kind_at(net, at, NodeKind::Fan, 1)) not_applicable("replicator is not on a fan's first aux port");
  const NodeId fan = at.node;
  const Node rep = net.node(r);
  const std::string tag = net.node(fan).label;

  Splice s(net);
  s.doom(r);
  s.doom(fan);
  std::vector<NodeId> created;
  const NodeId out = net.add(Node::replicator(rep.level, rep.deltas, rep.unpaired));
  const NodeId in = net.add(Node::replicator(rep.level, rep.deltas, rep.unpaired));
  created.push_back(out);
  created.push_back(in);
  s.to_fresh({fan, 2}, {out, 0});
  s.to_fresh({fan, 0}, {in, 0});
  for (std::size_t i = 0; i < rep.arity(); ++i) {
    const NodeId f = net.add(Node::fan(tag));
    created.push_back(f);
    s.to_fresh({r, aux(i)}, {f, 1});
    net.link({out, aux(i)}, {f, 2});
    net.link({in, aux(i)}, {f, 0});
  }
  return s.apply(std::move(created));
}

}  // namespace deltanet
