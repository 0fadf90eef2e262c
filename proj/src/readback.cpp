#include "deltanet/readback.hpp"

#include <map>
#include <set>

namespace deltanet {

NotCanonical::NotCanonical(NodeId node, const std::string& detail)
    : std::runtime_error("NotCanonical: " + detail + (node == kNoNode ? "" : " (node " + std::to_string(node) + ")")),
      node_(node) {}

namespace {

enum Token : std::int64_t {
  kLam = -1,
  kApp = -2,
  kOcc = -3,
  kFree = -4,
  kErasedVar = -5,
  kDirectVar = -6,
  kSharedVar = -7,
  kFrame = -8,
  kEnd = -9,
};

class Decoder {
 public:
  Decoder(const Net& net, const ReadbackOptions& options) : net_(net), options_(options) {
    for (NodeId id : net.ids()) {
      if (net.kind(id) == NodeKind::FreeVar) reserved_.insert(net.node(id).label);
    }
  }

  Term run() {
    const auto root = net_.root();
    if (!root) throw NotCanonical(kNoNode, "net has no root");
    accounted_.insert(*root);
    Term t = decode(net_.peer({*root, 0}));
    for (NodeId id : net_.ids()) {
      if (accounted_.count(id)) continue;
      if (net_.kind(id) == NodeKind::Replicator) {
        bool all = true;
        for (std::uint32_t s = 1; s <= net_.node(id).arity(); ++s) all = all && reached_.count({id, s});
        if (all) continue;
        throw NotCanonical(id, "replicator has occurrences outside the term");
      }
      throw NotCanonical(id, std::string(kind_name(net_.kind(id))) + " not reachable from the root");
    }
    return t;
  }

  std::vector<std::int64_t> signature() && { return std::move(sig_); }

 private:
  Term decode(PortRef at) {
    if (!at.valid() || !net_.contains(at.node)) throw NotCanonical(kNoNode, "dangling wire");
    const Node& n = net_.node(at.node);
    switch (n.kind) {
      case NodeKind::FreeVar:
        accounted_.insert(at.node);
        sig_.push_back(kFree);
        return Term::var(n.label);
      case NodeKind::Fan:
        if (at.slot == 0) return abstraction(at.node);
        if (at.slot == 1) return application(at.node);
        return occurrence(at);
      case NodeKind::Replicator:
        if (at.slot == 0) throw NotCanonical(at.node, "reached a replicator's principal port");
        return occurrence(at);
      case NodeKind::Eraser: throw NotCanonical(at.node, "reached an eraser");
      case NodeKind::Root: throw NotCanonical(at.node, "reached the root");
    }
    throw NotCanonical(at.node, "unknown node");
  }

  void enter(NodeId fan) {
    if (!accounted_.insert(fan).second) throw NotCanonical(fan, "cycle through a fan");
  }

  Term abstraction(NodeId fan) {
    enter(fan);
    std::string name;
    do {
      name = "v" + std::to_string(counter_++);
    } while (reserved_.count(name));
    const std::int64_t index = static_cast<std::int64_t>(binders_.size());
    binders_[fan] = {name, index};
    sig_.push_back(kLam);

    const PortRef var = net_.peer({fan, 2});
    if (var.valid() && net_.kind(var.node) == NodeKind::Eraser) {
      accounted_.insert(var.node);
      sig_.push_back(kErasedVar);
    } else if (var.valid() && net_.kind(var.node) == NodeKind::Replicator && var.slot == 0) {
      sig_.push_back(kSharedVar);
    } else {
      sig_.push_back(kDirectVar);
    }

    scope_.insert(fan);
    Term body = decode(net_.peer({fan, 1}));
    scope_.erase(fan);
    return Term::abs(name, std::move(body));
  }

  Term application(NodeId fan) {
    enter(fan);
    sig_.push_back(kApp);
    Term fun = decode(net_.peer({fan, 0}));
    Term arg = decode(net_.peer({fan, 2}));
    return Term::app(std::move(fun), std::move(arg));
  }

  // `at` is an abstraction's variable port or a replicator aux port.
  Term occurrence(PortRef at) {
    sig_.push_back(kOcc);
    PortRef cur = at;
    std::set<NodeId> chain;
    std::int64_t offset = 0;
    while (net_.kind(cur.node) == NodeKind::Replicator) {
      const NodeId r = cur.node;
      if (!chain.insert(r).second) throw NotCanonical(r, "cycle through replicators");
      const Node& n = net_.node(r);
      if (!reached_.insert(cur).second && cur == at) throw NotCanonical(r, "replicator port reached twice");
      offset += n.deltas[cur.slot - 1];
      const PortRef up = net_.peer({r, 0});
      if (!up.valid()) throw NotCanonical(r, "dangling replicator");
      if (net_.kind(up.node) == NodeKind::Replicator) {
        if (!options_.allow_replicator_trees || up.slot == 0) throw NotCanonical(r, "replicator feeds a replicator");
        reached_.insert(up);
        cur = up;
        continue;
      }
      // Trees of any shape realize the same sharing; only the top level and
      // the accumulated delta of each occurrence are recorded.
      sig_.push_back(kFrame);
      sig_.push_back(n.level);
      sig_.push_back(offset);
      if (!options_.allow_replicator_trees) sig_.push_back(static_cast<std::int64_t>(n.arity()));
      if (net_.kind(up.node) == NodeKind::FreeVar) {
        accounted_.insert(up.node);
        sig_.push_back(kFree);
        sig_.push_back(kEnd);
        return Term::var(net_.node(up.node).label);
      }
      if (net_.kind(up.node) != NodeKind::Fan || up.slot != 2) {
        throw NotCanonical(r, "replicator is not attached to a variable port");
      }
      cur = up;
    }
    if (net_.kind(cur.node) != NodeKind::Fan || cur.slot != 2) throw NotCanonical(cur.node, "bad occurrence");
    auto it = binders_.find(cur.node);
    if (it == binders_.end() || !scope_.count(cur.node)) {
      throw NotCanonical(cur.node, "occurrence outside the scope of its binder");
    }
    sig_.push_back(it->second.index);
    sig_.push_back(kEnd);
    return Term::var(it->second.name);
  }

  struct Binder {
    std::string name;
    std::int64_t index;
  };

  const Net& net_;
  ReadbackOptions options_;
  std::set<std::string> reserved_;
  std::set<NodeId> accounted_;
  std::set<NodeId> scope_;
  std::map<NodeId, Binder> binders_;
  std::set<PortRef> reached_;
  std::size_t counter_ = 0;
  std::vector<std::int64_t> sig_;
};

}  // namespace

Term readback(const Net& net, const ReadbackOptions& options) { return Decoder(net, options).run(); }

std::vector<std::int64_t> canonical_signature(const Net& net, const ReadbackOptions& options) {
  Decoder d(net, options);
  d.run();
  return std::move(d).signature();
}

bool is_canonical(const Net& net, std::optional<Flavor> flavor, bool binary_replicators) {
  try {
    net.validate();
    if (!active_pairs(net).empty()) return false;
    const ReadbackOptions options{binary_replicators};
    Decoder d(net, options);
    const Term t = d.run();
    const std::vector<std::int64_t> sig = std::move(d).signature();
    const Calculus least = classify(t);
    for (Flavor f : {Flavor::L, Flavor::A, Flavor::I, Flavor::K}) {
      if (flavor ? f != *flavor : !calculus_leq(least, f)) continue;
      try {
        const Net image = translate(t, f, {.fan_tags = false, .binary_replicators = binary_replicators});
        if (canonical_signature(image, options) == sig) return true;
      } catch (const FlavorMismatch&) {
      }
    }
    return false;
  } catch (const NotCanonical&) {
    return false;
  } catch (const NetError&) {
    return false;
  }
}

}  // namespace deltanet
