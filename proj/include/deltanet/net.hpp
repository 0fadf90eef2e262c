#pragma once

#include <atomic>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace deltanet {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class NodeKind : std::uint8_t { Root, FreeVar, Fan, Eraser, Replicator };

std::string_view kind_name(NodeKind kind);

/// A port of a node. Slot 0 is the principal port of an agent (or the only
/// port of Root/FreeVar); auxiliary ports are slots 1..arity, clockwise.
struct PortRef {
  NodeId node = kNoNode;
  std::uint32_t slot = 0;

  bool valid() const { return node != kNoNode; }
  friend auto operator<=>(const PortRef&, const PortRef&) = default;
};

/// Payload of a node. Which fields matter depends on `kind`:
///  - Fan: `label` is a debug tag ("lam", "app" or empty) that no rule reads.
///  - Replicator: `level`, one `deltas` entry per aux port, `unpaired`.
///  - FreeVar: `label` is the variable name.
struct Node {
  NodeKind kind = NodeKind::Eraser;
  std::string label;
  std::uint32_t level = 0;
  std::vector<std::int32_t> deltas;
  bool unpaired = false;

  static Node root() { return {NodeKind::Root, {}, 0, {}, false}; }
  static Node free_var(std::string name) { return {NodeKind::FreeVar, std::move(name), 0, {}, false}; }
  static Node fan(std::string tag = {}) { return {NodeKind::Fan, std::move(tag), 0, {}, false}; }
  static Node eraser() { return {NodeKind::Eraser, {}, 0, {}, false}; }
  static Node replicator(std::uint32_t level, std::vector<std::int32_t> deltas, bool unpaired) {
    return {NodeKind::Replicator, {}, level, std::move(deltas), unpaired};
  }

  bool is_agent() const { return kind == NodeKind::Fan || kind == NodeKind::Eraser || kind == NodeKind::Replicator; }
  /// Number of auxiliary ports.
  std::size_t arity() const;
  std::size_t port_count() const { return is_agent() ? arity() + 1 : 1; }

  friend bool operator==(const Node&, const Node&) = default;
};

enum class NetErrc : std::uint8_t {
  DanglingPort,
  MultipleRoots,
  MissingRoot,
  SelfLoopOnOnePort,
  BadPort,
  BadNode,
};

std::string_view errc_name(NetErrc code);

class NetError : public std::runtime_error {
 public:
  NetError(NetErrc code, const std::string& detail);
  NetErrc code() const { return code_; }

 private:
  NetErrc code_;
};

using Wire = std::pair<PortRef, PortRef>;

/// Live-node counter that stays consistent when disjoint rewrites run on
/// several threads.
class NodeCounter {
 public:
  NodeCounter() = default;
  NodeCounter(const NodeCounter& other) : value_(other.get()) {}
  NodeCounter& operator=(const NodeCounter& other) {
    value_.store(other.get(), std::memory_order_relaxed);
    return *this;
  }
  std::size_t get() const { return value_.load(std::memory_order_relaxed); }
  void up() { value_.fetch_add(1, std::memory_order_relaxed); }
  void down() { value_.fetch_sub(1, std::memory_order_relaxed); }

 private:
  std::atomic<std::size_t> value_{0};
};

/// A Δ-net stored as an explicit perfect matching: every port knows its peer.
/// Node ids are allocated monotonically and never reused.
class Net {
 public:
  Net() = default;

  /// Validating constructor from an explicit node list and wire list.
  static Net build(const std::vector<std::pair<NodeId, Node>>& nodes, const std::vector<Wire>& wires);

  NodeId add(Node node);

  /// Appends `count` unused ids and returns the first. Rewrites running on
  /// other threads can draw fresh ids from such a block through IdBlock
  /// without touching shared allocation state.
  NodeId reserve_ids(std::size_t count);

  /// While alive, add() on the constructing thread takes ids from
  /// [first, first + count) of `net` instead of appending.
  class IdBlock {
   public:
    IdBlock(Net& net, NodeId first, std::size_t count);
    ~IdBlock();
    IdBlock(const IdBlock&) = delete;
    IdBlock& operator=(const IdBlock&) = delete;

   private:
    friend class Net;
    const Net* net_;
    NodeId next_;
    NodeId end_;
    IdBlock* outer_;
  };
  /// Connects two currently unconnected (or about to be overwritten) ports.
  void link(PortRef a, PortRef b);
  void remove(NodeId id);

  bool contains(NodeId id) const { return id < slots_.size() && slots_[id].alive; }
  const Node& node(NodeId id) const { return slots_[id].node; }
  /// Mutable payload access; callers keep `deltas` consistent with port count.
  Node& node_mut(NodeId id) { return slots_[id].node; }
  NodeKind kind(NodeId id) const { return slots_[id].node.kind; }
  PortRef peer(PortRef p) const { return slots_[p.node].peers[p.slot]; }
  std::size_t port_count(NodeId id) const { return slots_[id].peers.size(); }

  /// Replaces a replicator's aux port list; peers must be relinked after.
  void reshape_replicator(NodeId id, std::vector<std::int32_t> deltas);

  /// Alive node ids in ascending order.
  std::vector<NodeId> ids() const;
  std::size_t node_count() const { return alive_.get(); }
  std::size_t live_agents() const { return agents_.get(); }
  /// One past the largest id ever allocated.
  NodeId id_bound() const { return static_cast<NodeId>(slots_.size()); }
  std::optional<NodeId> root() const;

  /// Every wire once, as (smaller port, larger port), sorted.
  std::vector<Wire> wires() const;

  /// Throws NetError on the first violated structural invariant.
  void validate() const;

  /// Renumbers alive nodes to 0..n-1 preserving order.
  Net compacted() const;

  friend bool operator==(const Net& a, const Net& b);

 private:
  struct Slot {
    Node node;
    std::vector<PortRef> peers;
    bool alive = false;
  };

  NodeId place(NodeId id, Node node);

  std::vector<Slot> slots_;
  NodeCounter alive_;
  NodeCounter agents_;
};

struct ActivePair {
  NodeId a;
  NodeId b;
  friend auto operator<=>(const ActivePair&, const ActivePair&) = default;
};

/// Agents connected principal-to-principal, ordered by the smaller node id.
std::vector<ActivePair> active_pairs(const Net& net);

struct AgentCounts {
  std::size_t fans = 0;
  std::size_t erasers = 0;
  std::size_t replicators = 0;
  friend bool operator==(const AgentCounts&, const AgentCounts&) = default;
};

AgentCounts count_agents(const Net& net);

enum class Polarity : std::uint8_t { Parent, Child };

struct OrientationReport {
  bool consistent = true;
  /// Polarity per port, as (port, polarity); only filled when consistent.
  std::vector<std::pair<PortRef, Polarity>> assignment;
  /// First wire found joining two ports of equal polarity.
  std::optional<Wire> conflict;
  std::string message;

  std::optional<Polarity> polarity_of(PortRef p) const;
};

/// Assigns each port a parent/child polarity so that every wire joins a
/// parent port to a child port. Fans may act as abstractions or
/// applications and replicators as fan-ins or fan-outs; the roles are
/// inferred by propagation from the Root.
OrientationReport check_parent_child_duality(const Net& net);

}  // namespace deltanet
