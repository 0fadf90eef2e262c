#include "deltanet/serialize.hpp"

#include <sstream>

#include <json.hpp>

namespace deltanet {

using nlohmann::json;

NetFormat parse_net_format(std::string_view name) {
  if (name == "json") return NetFormat::Json;
  if (name == "dot") return NetFormat::Dot;
  throw FormatError("UnknownFormat: '" + std::string(name) + "'");
}

namespace {

json node_json(NodeId id, const Node& n) {
  json j;
  j["id"] = id;
  j["kind"] = std::string(kind_name(n.kind));
  switch (n.kind) {
    case NodeKind::Fan:
      if (!n.label.empty()) j["tag"] = n.label;
      break;
    case NodeKind::FreeVar:
      j["name"] = n.label;
      break;
    case NodeKind::Replicator:
      j["level"] = n.level;
      j["deltas"] = n.deltas;
      j["unpaired"] = n.unpaired;
      break;
    default:
      break;
  }
  return j;
}

NodeKind kind_from(const std::string& s) {
  if (s == "root") return NodeKind::Root;
  if (s == "freevar") return NodeKind::FreeVar;
  if (s == "fan") return NodeKind::Fan;
  if (s == "eraser") return NodeKind::Eraser;
  if (s == "replicator") return NodeKind::Replicator;
  throw FormatError("unknown node kind '" + s + "'");
}

PortRef port_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("port must be a [node, slot] pair");
  return {j.at(0).get<NodeId>(), j.at(1).get<std::uint32_t>()};
}

std::string escape_dot(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string dot_label(const Node& n) {
  std::ostringstream os;
  switch (n.kind) {
    case NodeKind::Root: os << "root"; break;
    case NodeKind::FreeVar: os << n.label; break;
    case NodeKind::Eraser: os << "eraser"; break;
    case NodeKind::Fan:
      os << "fan";
      if (n.label == "lam") os << " \xCE\xBB";
      else if (n.label == "app") os << " @";
      break;
    case NodeKind::Replicator: {
      os << "rep " << n.level << " [";
      for (std::size_t i = 0; i < n.deltas.size(); ++i) os << (i ? "," : "") << n.deltas[i];
      os << "]";
      if (n.unpaired) os << " u";
      break;
    }
  }
  return os.str();
}

std::string_view dot_shape(NodeKind k) {
  switch (k) {
    case NodeKind::Root: return "circle";
    case NodeKind::FreeVar: return "plaintext";
    case NodeKind::Fan: return "triangle";
    case NodeKind::Eraser: return "point";
    case NodeKind::Replicator: return "invtrapezium";
  }
  return "box";
}

}  // namespace

std::string to_json(const Net& net) {
  json nodes = json::array();
  for (NodeId id : net.ids()) nodes.push_back(node_json(id, net.node(id)));
  json wires = json::array();
  for (const auto& [a, b] : net.wires()) {
    wires.push_back(json::array({json::array({a.node, a.slot}), json::array({b.node, b.slot})}));
  }
  json root;
  root["nodes"] = std::move(nodes);
  root["wires"] = std::move(wires);
  return root.dump();
}

std::string to_dot(const Net& net, std::string_view graph_name) {
  std::ostringstream os;
  os << "digraph " << graph_name << " {\n";
  os << "  node [fontname=\"Helvetica\"];\n";
  for (NodeId id : net.ids()) {
    const Node& n = net.node(id);
    os << "  n" << id << " [label=\"" << escape_dot(dot_label(n)) << "\", shape=" << dot_shape(n.kind)
       << (n.kind == NodeKind::Eraser ? ", width=0.15" : "") << "];\n";
  }
  // Arrowheads mark principal ports of agents.
  for (const auto& [a, b] : net.wires()) {
    auto principal = [&](PortRef p) { return p.slot == 0 && net.node(p.node).is_agent(); };
    os << "  n" << a.node << " -> n" << b.node << " [dir=both, arrowtail="
       << (principal(a) ? "normal" : "none") << ", arrowhead=" << (principal(b) ? "normal" : "none")
       << ", taillabel=\"" << a.slot << "\", headlabel=\"" << b.slot << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::string serialize(const Net& net, NetFormat format) {
  return format == NetFormat::Json ? to_json(net) : to_dot(net);
}

std::string serialize(const Net& net, std::string_view format) {
  return serialize(net, parse_net_format(format));
}

Net from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
  std::vector<std::pair<NodeId, Node>> nodes;
  std::vector<Wire> wires;
  try {
    for (const json& jn : doc.at("nodes")) {
      Node n;
      n.kind = kind_from(jn.at("kind").get<std::string>());
      switch (n.kind) {
        case NodeKind::Fan:
          n.label = jn.value("tag", std::string());
          break;
        case NodeKind::FreeVar:
          n.label = jn.at("name").get<std::string>();
          break;
        case NodeKind::Replicator:
          n.level = jn.at("level").get<std::uint32_t>();
          n.deltas = jn.at("deltas").get<std::vector<std::int32_t>>();
          n.unpaired = jn.value("unpaired", false);
          break;
        default:
          break;
      }
      nodes.emplace_back(jn.at("id").get<NodeId>(), std::move(n));
    }
    for (const json& jw : doc.at("wires")) {
      if (!jw.is_array() || jw.size() != 2) throw FormatError("wire must be a pair of ports");
      wires.emplace_back(port_from(jw.at(0)), port_from(jw.at(1)));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed net JSON: ") + e.what());
  }
  return Net::build(nodes, wires);
}

Net deserialize(std::string_view text, NetFormat format) {
  if (format != NetFormat::Json) throw FormatError("UnknownFormat: dot is export-only");
  return from_json(text);
}

}  // namespace deltanet
