#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "deltanet/net.hpp"

namespace deltanet {

enum class NetFormat { Json, Dot };

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "json" or "dot"; throws FormatError (UnknownFormat) otherwise.
NetFormat parse_net_format(std::string_view name);

/// JSON nodes are listed by ascending id and wires sorted, so equal nets
/// serialize to identical bytes.
std::string to_json(const Net& net);
std::string to_dot(const Net& net, std::string_view graph_name = "deltanet");
std::string serialize(const Net& net, NetFormat format);
std::string serialize(const Net& net, std::string_view format);

/// Throws FormatError for malformed JSON or unknown node kinds, NetError for
/// structural violations (a port wired twice, a missing root, ...).
Net from_json(std::string_view text);
/// Only JSON can be read back; DOT is export-only.
Net deserialize(std::string_view text, NetFormat format);

}  // namespace deltanet
