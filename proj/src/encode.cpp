#include "deltanet/encode.hpp"

#include <span>
#include <vector>

namespace deltanet {

FlavorMismatch::FlavorMismatch(Flavor flavor, const std::string& detail)
    : std::runtime_error("FlavorMismatch: " + detail + " (flavor " + std::string(calculus_name(flavor)) + ")"),
      flavor_(flavor) {}

namespace {

struct Occurrence {
  PortRef parent;
  std::uint32_t level;
};

struct Binder {
  const std::string* name;
  std::vector<Occurrence> occurrences;
};

class Encoder {
 public:
  Encoder(Flavor flavor, const TranslateOptions& options) : flavor_(flavor), options_(options) {}

  Net run(const Term& t) {
    const NodeId root = net_.add(Node::root());
    build(t, 0, {root, 0});
    return std::move(net_);
  }

 private:
  bool erasure() const { return flavor_ == Flavor::A || flavor_ == Flavor::K; }
  bool sharing() const { return flavor_ == Flavor::I || flavor_ == Flavor::K; }

  void build(const Term& t, std::uint32_t level, PortRef parent) {
    switch (t.kind()) {
      case Term::Kind::Var: {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
          if (*it->name == t.name()) {
            it->occurrences.push_back({parent, level});
            return;
          }
        }
        const NodeId fv = net_.add(Node::free_var(t.name()));
        net_.link(parent, {fv, 0});
        return;
      }
      case Term::Kind::App: {
        const NodeId app = net_.add(Node::fan(options_.fan_tags ? "app" : ""));
        net_.link(parent, {app, 1});
        build(t.fun(), level, {app, 0});
        build(t.arg(), level + 1, {app, 2});
        return;
      }
      case Term::Kind::Abs: {
        const NodeId lam = net_.add(Node::fan(options_.fan_tags ? "lam" : ""));
        net_.link(parent, {lam, 0});
        scope_.push_back({&t.name(), {}});
        build(t.body(), level, {lam, 1});
        std::vector<Occurrence> occ = std::move(scope_.back().occurrences);
        scope_.pop_back();
        bind(t.name(), level, {lam, 2}, occ);
        return;
      }
    }
  }

  void bind(const std::string& name, std::uint32_t level, PortRef var_port, const std::vector<Occurrence>& occ) {
    if (occ.empty()) {
      if (!erasure()) throw FlavorMismatch(flavor_, "binder '" + name + "' is unused");
      const NodeId e = net_.add(Node::eraser());
      net_.link(var_port, {e, 0});
      return;
    }
    if (occ.size() > 1 && !sharing()) {
      throw FlavorMismatch(flavor_, "binder '" + name + "' occurs " + std::to_string(occ.size()) + " times");
    }
    const std::uint32_t rep_level = level + 1;
    std::vector<std::int32_t> deltas;
    std::vector<PortRef> ports;
    for (const Occurrence& o : occ) {
      deltas.push_back(static_cast<std::int32_t>(o.level) - static_cast<std::int32_t>(rep_level));
      ports.push_back(o.parent);
    }
    if (!sharing() || (occ.size() == 1 && deltas[0] == 0)) {
      net_.link(var_port, occ[0].parent);
      return;
    }
    const NodeId r = replicator_tree(rep_level, deltas, ports);
    net_.link(var_port, {r, 0});
  }

  // Returns the root replicator; its principal port is left unwired.
  NodeId replicator_tree(std::uint32_t level, std::span<const std::int32_t> deltas, std::span<const PortRef> ports) {
    const std::size_t n = deltas.size();
    if (!options_.binary_replicators || n <= 2) {
      const NodeId r = net_.add(Node::replicator(level, {deltas.begin(), deltas.end()}, true));
      for (std::size_t i = 0; i < n; ++i) net_.link({r, static_cast<std::uint32_t>(i + 1)}, ports[i]);
      return r;
    }
    const NodeId r = net_.add(Node::replicator(level, {0, deltas[n - 1]}, true));
    const NodeId left = replicator_tree(level, deltas.first(n - 1), ports.first(n - 1));
    net_.link({r, 1}, {left, 0});
    net_.link({r, 2}, ports[n - 1]);
    return r;
  }

  Flavor flavor_;
  TranslateOptions options_;
  Net net_;
  std::vector<Binder> scope_;
};

}  // namespace

Net translate(const Term& t, Flavor flavor, const TranslateOptions& options) {
  return Encoder(flavor, options).run(t);
}

Net translate(const Term& t, const TranslateOptions& options) { return translate(t, classify(t), options); }

NetInterface interface_of(const Net& net) {
  NetInterface out;
  for (NodeId id : net.ids()) {
    if (net.kind(id) == NodeKind::Root) out.root = id;
    if (net.kind(id) == NodeKind::FreeVar) out.free.insert(net.node(id).label);
  }
  return out;
}

}  // namespace deltanet
