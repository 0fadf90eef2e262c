#include "deltanet/net.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace deltanet {

std::string_view kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::Root: return "root";
    case NodeKind::FreeVar: return "freevar";
    case NodeKind::Fan: return "fan";
    case NodeKind::Eraser: return "eraser";
    case NodeKind::Replicator: return "replicator";
  }
  return "?";
}

std::size_t Node::arity() const {
  switch (kind) {
    case NodeKind::Fan: return 2;
    case NodeKind::Replicator: return deltas.size();
    default: return 0;
  }
}

std::string_view errc_name(NetErrc code) {
  switch (code) {
    case NetErrc::DanglingPort: return "DanglingPort";
    case NetErrc::MultipleRoots: return "MultipleRoots";
    case NetErrc::MissingRoot: return "MissingRoot";
    case NetErrc::SelfLoopOnOnePort: return "SelfLoopOnOnePort";
    case NetErrc::BadPort: return "BadPort";
    case NetErrc::BadNode: return "BadNode";
  }
  return "?";
}

NetError::NetError(NetErrc code, const std::string& detail)
    : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

namespace {

std::string port_str(PortRef p) {
  return "(" + std::to_string(p.node) + "," + std::to_string(p.slot) + ")";
}

}  // namespace

NodeId Net::place(NodeId id, Node node) {
  if (id >= slots_.size()) slots_.resize(static_cast<std::size_t>(id) + 1);
  Slot& s = slots_[id];
  s.peers.assign(node.port_count(), PortRef{});
  if (node.is_agent()) agents_.up();
  s.node = std::move(node);
  s.alive = true;
  alive_.up();
  return id;
}

namespace {
thread_local Net::IdBlock* active_block = nullptr;
}  // namespace

Net::IdBlock::IdBlock(Net& net, NodeId first, std::size_t count)
    : net_(&net), next_(first), end_(first + static_cast<NodeId>(count)), outer_(active_block) {
  active_block = this;
}

Net::IdBlock::~IdBlock() { active_block = outer_; }

NodeId Net::add(Node node) {
  if (active_block && active_block->net_ == this) {
    if (active_block->next_ == active_block->end_) throw std::logic_error("reserved id block exhausted");
    return place(active_block->next_++, std::move(node));
  }
  return place(static_cast<NodeId>(slots_.size()), std::move(node));
}

NodeId Net::reserve_ids(std::size_t count) {
  const auto first = static_cast<NodeId>(slots_.size());
  slots_.resize(slots_.size() + count);
  return first;
}

void Net::link(PortRef a, PortRef b) {
  slots_[a.node].peers[a.slot] = b;
  slots_[b.node].peers[b.slot] = a;
}

void Net::remove(NodeId id) {
  Slot& s = slots_[id];
  if (!s.alive) return;
  if (s.node.is_agent()) agents_.down();
  s.alive = false;
  alive_.down();
  s.peers.clear();
  s.peers.shrink_to_fit();
  s.node.deltas.clear();
}

void Net::reshape_replicator(NodeId id, std::vector<std::int32_t> deltas) {
  Slot& s = slots_[id];
  s.node.deltas = std::move(deltas);
  s.peers.assign(s.node.port_count(), PortRef{});
}

std::vector<NodeId> Net::ids() const {
  std::vector<NodeId> out;
  out.reserve(alive_.get());
  for (NodeId i = 0; i < slots_.size(); ++i) {
    if (slots_[i].alive) out.push_back(i);
  }
  return out;
}

std::optional<NodeId> Net::root() const {
  for (NodeId i = 0; i < slots_.size(); ++i) {
    if (slots_[i].alive && slots_[i].node.kind == NodeKind::Root) return i;
  }
  return std::nullopt;
}

std::vector<Wire> Net::wires() const {
  std::vector<Wire> out;
  for (NodeId i = 0; i < slots_.size(); ++i) {
    const Slot& s = slots_[i];
    if (!s.alive) continue;
    for (std::uint32_t k = 0; k < s.peers.size(); ++k) {
      const PortRef here{i, k};
      const PortRef there = s.peers[k];
      if (here <= there) out.emplace_back(here, there);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void Net::validate() const {
  std::size_t roots = 0;
  for (NodeId i = 0; i < slots_.size(); ++i) {
    const Slot& s = slots_[i];
    if (!s.alive) continue;
    if (s.node.kind == NodeKind::Root) ++roots;
    if (s.node.kind == NodeKind::Replicator && s.node.deltas.empty()) {
      throw NetError(NetErrc::BadNode, "replicator " + std::to_string(i) + " has no aux ports");
    }
    if (s.peers.size() != s.node.port_count()) {
      throw NetError(NetErrc::BadNode, "node " + std::to_string(i) + " has a port table of the wrong size");
    }
    for (std::uint32_t k = 0; k < s.peers.size(); ++k) {
      const PortRef here{i, k};
      const PortRef there = s.peers[k];
      if (!there.valid()) throw NetError(NetErrc::DanglingPort, "port " + port_str(here) + " is not wired");
      if (there == here) {
        throw NetError(NetErrc::SelfLoopOnOnePort, "port " + port_str(here) + " is wired to itself");
      }
      if (!contains(there.node) || there.slot >= slots_[there.node].peers.size()) {
        throw NetError(NetErrc::BadPort, "port " + port_str(here) + " points at missing port " + port_str(there));
      }
      if (peer(there) != here) {
        throw NetError(NetErrc::DanglingPort,
                       "wire " + port_str(here) + "-" + port_str(there) + " is not symmetric");
      }
    }
  }
  if (roots == 0) throw NetError(NetErrc::MissingRoot, "net has no root node");
  if (roots > 1) throw NetError(NetErrc::MultipleRoots, std::to_string(roots) + " root nodes");
}

Net Net::build(const std::vector<std::pair<NodeId, Node>>& nodes, const std::vector<Wire>& wires) {
  Net net;
  for (const auto& [id, node] : nodes) {
    if (id == kNoNode) throw NetError(NetErrc::BadNode, "reserved node id");
    if (net.contains(id)) throw NetError(NetErrc::BadNode, "duplicate node id " + std::to_string(id));
    if (node.kind == NodeKind::Replicator && node.deltas.empty()) {
      throw NetError(NetErrc::BadNode, "replicator " + std::to_string(id) + " has no aux ports");
    }
    net.place(id, node);
  }
  for (const auto& [a, b] : wires) {
    for (const PortRef p : {a, b}) {
      if (!net.contains(p.node) || p.slot >= net.port_count(p.node)) {
        throw NetError(NetErrc::BadPort, "wire endpoint " + port_str(p) + " does not exist");
      }
    }
    if (a == b) throw NetError(NetErrc::SelfLoopOnOnePort, "port " + port_str(a) + " is wired to itself");
    for (const PortRef p : {a, b}) {
      if (net.peer(p).valid()) throw NetError(NetErrc::DanglingPort, "port " + port_str(p) + " is wired twice");
    }
    net.link(a, b);
  }
  net.validate();
  return net;
}

Net Net::compacted() const {
  std::vector<NodeId> remap(slots_.size(), kNoNode);
  Net out;
  for (NodeId i = 0; i < slots_.size(); ++i) {
    if (slots_[i].alive) remap[i] = out.add(slots_[i].node);
  }
  for (NodeId i = 0; i < slots_.size(); ++i) {
    const Slot& s = slots_[i];
    if (!s.alive) continue;
    for (std::uint32_t k = 0; k < s.peers.size(); ++k) {
      const PortRef p = s.peers[k];
      out.slots_[remap[i]].peers[k] = p.valid() ? PortRef{remap[p.node], p.slot} : PortRef{};
    }
  }
  return out;
}

bool operator==(const Net& a, const Net& b) {
  const NodeId n = std::max(a.id_bound(), b.id_bound());
  for (NodeId i = 0; i < n; ++i) {
    const bool in_a = a.contains(i);
    if (in_a != b.contains(i)) return false;
    if (!in_a) continue;
    if (!(a.node(i) == b.node(i))) return false;
    if (a.slots_[i].peers != b.slots_[i].peers) return false;
  }
  return true;
}

std::vector<ActivePair> active_pairs(const Net& net) {
  std::vector<ActivePair> out;
  for (NodeId id : net.ids()) {
    if (!net.node(id).is_agent()) continue;
    const PortRef p = net.peer({id, 0});
    if (p.slot == 0 && p.node > id && net.contains(p.node) && net.node(p.node).is_agent()) {
      out.push_back({id, p.node});
    }
  }
  return out;
}

AgentCounts count_agents(const Net& net) {
  AgentCounts c;
  for (NodeId id : net.ids()) {
    switch (net.kind(id)) {
      case NodeKind::Fan: ++c.fans; break;
      case NodeKind::Eraser: ++c.erasers; break;
      case NodeKind::Replicator: ++c.replicators; break;
      default: break;
    }
  }
  return c;
}

std::optional<Polarity> OrientationReport::polarity_of(PortRef p) const {
  for (const auto& [port, pol] : assignment) {
    if (port == p) return pol;
  }
  return std::nullopt;
}

namespace {

// Polarity of a port when its node is in role 0 (abstraction fan, fan-in
// replicator). Role 1 flips every port of the node. 1 = parent.
int base_polarity(NodeKind kind, std::uint32_t slot) {
  switch (kind) {
    case NodeKind::Root: return 0;
    case NodeKind::FreeVar: return 1;
    case NodeKind::Eraser: return 1;
    case NodeKind::Fan: return slot == 1 ? 0 : 1;
    case NodeKind::Replicator: return slot == 0 ? 0 : 1;
  }
  return 0;
}

bool has_fixed_role(NodeKind kind) { return kind == NodeKind::Root || kind == NodeKind::FreeVar; }

}  // namespace

OrientationReport check_parent_child_duality(const Net& net) {
  OrientationReport report;
  std::vector<int> role(net.id_bound(), -1);
  std::vector<NodeId> order = net.ids();
  // Seed from the root, then free variables, then anything disconnected.
  std::stable_sort(order.begin(), order.end(), [&](NodeId x, NodeId y) {
    auto rank = [&](NodeId n) {
      switch (net.kind(n)) {
        case NodeKind::Root: return 0;
        case NodeKind::FreeVar: return 1;
        default: return 2;
      }
    };
    return rank(x) < rank(y);
  });

  std::deque<NodeId> queue;
  for (NodeId seed : order) {
    if (role[seed] != -1) continue;
    role[seed] = 0;
    queue.push_back(seed);
    while (!queue.empty()) {
      const NodeId n = queue.front();
      queue.pop_front();
      const NodeKind kn = net.kind(n);
      for (std::uint32_t k = 0; k < net.port_count(n); ++k) {
        const PortRef here{n, k};
        const PortRef there = net.peer(here);
        const NodeKind kt = net.kind(there.node);
        const int pol_here = base_polarity(kn, k) ^ role[n];
        // Erasers take whichever role the wire demands.
        const int want_role = (pol_here ^ 1) ^ base_polarity(kt, there.slot);
        if (role[there.node] == -1) {
          if (has_fixed_role(kt) && want_role != 0) {
            role[there.node] = 0;
          } else {
            role[there.node] = want_role;
            queue.push_back(there.node);
            continue;
          }
        }
        if (role[there.node] != want_role) {
          report.consistent = false;
          report.conflict = Wire{here, there};
          std::ostringstream msg;
          msg << "wire " << port_str(here) << "-" << port_str(there) << " joins two "
              << (pol_here ? "parent" : "child") << " ports (" << kind_name(kn) << " and "
              << kind_name(kt) << ")";
          report.message = msg.str();
          return report;
        }
      }
    }
  }

  for (NodeId n : net.ids()) {
    for (std::uint32_t k = 0; k < net.port_count(n); ++k) {
      const int pol = base_polarity(net.kind(n), k) ^ role[n];
      report.assignment.emplace_back(PortRef{n, k}, pol ? Polarity::Parent : Polarity::Child);
    }
  }
  report.message = "every wire joins a parent port to a child port";
  return report;
}

}  // namespace deltanet
