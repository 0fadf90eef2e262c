#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "deltanet/net.hpp"
#include "deltanet/term.hpp"

namespace deltanet {

/// Which translation variant to apply; same letters as the calculi.
using Flavor = Calculus;

class FlavorMismatch : public std::runtime_error {
 public:
  FlavorMismatch(Flavor flavor, const std::string& detail);
  Flavor flavor() const { return flavor_; }

 private:
  Flavor flavor_;
};

struct TranslateOptions {
  /// Record "lam"/"app" tags on fans. Rules never read them.
  bool fan_tags = true;
  /// Split replicators wider than two aux ports into left-leaning trees.
  bool binary_replicators = false;
};

/// Builds the canonical net of `t` under `flavor`. Levels start at 0 and
/// grow by one into each application argument. A binder's replicator sits
/// at its abstraction's level plus one and stores, per occurrence in
/// left-to-right order, occurrence level minus replicator level.
///
/// Throws FlavorMismatch when `t` needs erasure or sharing that `flavor`
/// does not provide.
Net translate(const Term& t, Flavor flavor, const TranslateOptions& options = {});

/// translate() with the flavor chosen as classify(t).
Net translate(const Term& t, const TranslateOptions& options = {});

struct NetInterface {
  NodeId root = kNoNode;
  std::set<std::string> free;
};

NetInterface interface_of(const Net& net);

}  // namespace deltanet
