#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "deltanet/encode.hpp"
#include "deltanet/net.hpp"
#include "deltanet/term.hpp"

namespace deltanet {

class NotCanonical : public std::runtime_error {
 public:
  NotCanonical(NodeId node, const std::string& detail);
  /// The offending node, or kNoNode when the problem is global.
  NodeId node() const { return node_; }

 private:
  NodeId node_;
};

struct ReadbackOptions {
  /// Accept replicators whose principal port sits on another replicator's
  /// aux port, as produced in binary-replicator mode.
  bool allow_replicator_trees = false;
};

/// Decodes a net by walking from the Root: a fan entered at its principal
/// port is an abstraction, a fan entered at aux port 1 an application, and
/// a replicator aux port or an abstraction's variable port an occurrence.
/// Fan redexes decode as redexes. Binders are named v0, v1, ... in preorder,
/// skipping names of free variables.
///
/// Throws NotCanonical on any other arrival (a replicator's principal port,
/// an eraser, the Root), on cycles, out-of-scope occurrences, or nodes the
/// walk does not account for.
Term readback(const Net& net, const ReadbackOptions& options = {});

/// Structural fingerprint gathered by the same walk: term shape, every
/// replicator level and per-occurrence delta, and how each binder's
/// variable port is realized. Independent of node ids and of the order of
/// a replicator's aux ports.
std::vector<std::int64_t> canonical_signature(const Net& net, const ReadbackOptions& options = {});

/// True iff the net reads back to some term t and equals, up to node ids
/// and replicator aux-port order, the translation of t under `flavor` (or,
/// when absent, under some flavor at least classify(t)). Unpaired flags are
/// not compared.
bool is_canonical(const Net& net, std::optional<Flavor> flavor = std::nullopt, bool binary_replicators = false);

}  // namespace deltanet
