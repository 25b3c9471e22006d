#include "dfpart/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace dfpart::io {

namespace {

[[noreturn]] void schema_error(const std::string& message, std::vector<std::string> witness = {}) {
  throw Error(Errc::schema, message, std::move(witness));
}

void require_object(const json& j, const std::string& what) {
  if (!j.is_object()) schema_error(what + " must be a JSON object");
}

void reject_unknown_fields(const json& j, std::initializer_list<std::string_view> allowed,
                           const std::string& what) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto name : allowed) known = known || item.key() == name;
    if (!known) schema_error(what + " has unknown field '" + item.key() + "'", {item.key()});
  }
}

const json& field(const json& j, const char* name, const std::string& what) {
  auto it = j.find(name);
  if (it == j.end()) schema_error(what + " is missing field '" + name + "'");
  return *it;
}

std::int64_t integer_field(const json& j, const char* name, const std::string& what) {
  const json& v = field(j, name, what);
  if (!v.is_number_integer()) schema_error(what + " field '" + name + "' must be an integer");
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
    schema_error(what + " field '" + name + "' is out of range");
  return v.get<std::int64_t>();
}

double number_field(const json& j, const char* name, const std::string& what) {
  const json& v = field(j, name, what);
  if (!v.is_number()) schema_error(what + " field '" + name + "' must be a number");
  return v.get<double>();
}

std::string string_field(const json& j, const char* name, const std::string& what) {
  const json& v = field(j, name, what);
  if (!v.is_string()) schema_error(what + " field '" + name + "' must be a string");
  return v.get<std::string>();
}

NodeId parse_node_id(const json& v, const std::string& what) {
  if (v.is_string()) return NodeId(v.get<std::string>());
  if (v.is_number_integer()) return NodeId(v.get<std::int64_t>());
  schema_error(what + " must be a string or an integer");
}

json node_id_to_json(const NodeId& id) {
  if (id.is_integer()) return id.as_integer();
  return id.as_string();
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("failed while reading '" + path.string() + "'");
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw Error(Errc::schema, path.string() + ": malformed JSON at byte " +
                                  std::to_string(e.byte) + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

GraphData parse_graph(const json& doc) {
  require_object(doc, "graph");
  reject_unknown_fields(doc, {"nodes", "edges"}, "graph");
  const json& nodes = field(doc, "nodes", "graph");
  const json& edges = field(doc, "edges", "graph");
  if (!nodes.is_array() || !edges.is_array()) schema_error("graph nodes/edges must be arrays");

  GraphData g;
  g.nodes.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const json& n = nodes[i];
    std::string what = "node #" + std::to_string(i);
    require_object(n, what);
    OperatorNode node;
    node.id = parse_node_id(field(n, "id", what), what + " id");
    what = "node '" + node.id.str() + "'";
    reject_unknown_fields(n, {"id", "op_kind", "op_count", "bytes_touched", "stateful",
                              "measured_cost_us"},
                          what);
    const std::string kind = string_field(n, "op_kind", what);
    auto op_kind = parse_op_kind(kind);
    if (!op_kind) schema_error(what + " has unknown op_kind '" + kind + "'", {node.id.str()});
    node.op_kind = *op_kind;
    node.op_count = integer_field(n, "op_count", what);
    node.bytes_touched = integer_field(n, "bytes_touched", what);
    const json& stateful = field(n, "stateful", what);
    if (!stateful.is_boolean()) schema_error(what + " field 'stateful' must be a boolean");
    node.statefulness = stateful.get<bool>() ? Statefulness::stateful : Statefulness::stateless;
    if (auto it = n.find("measured_cost_us"); it != n.end() && !it->is_null())
      node.measured_cost_us = number_field(n, "measured_cost_us", what);
    g.nodes.push_back(std::move(node));
  }

  g.edges.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const json& e = edges[i];
    const std::string what = "edge #" + std::to_string(i);
    require_object(e, what);
    reject_unknown_fields(e, {"src", "dst", "kind", "bytes"}, what);
    Edge edge;
    edge.src = parse_node_id(field(e, "src", what), what + " src");
    edge.dst = parse_node_id(field(e, "dst", what), what + " dst");
    const std::string kind = string_field(e, "kind", what);
    auto edge_kind = parse_edge_kind(kind);
    if (!edge_kind) schema_error(what + " has unknown kind '" + kind + "'");
    edge.kind = *edge_kind;
    edge.bytes = integer_field(e, "bytes", what);
    g.edges.push_back(std::move(edge));
  }
  return g;
}

DeviceFleet parse_fleet(const json& doc) {
  require_object(doc, "fleet");
  reject_unknown_fields(doc, {"devices"}, "fleet");
  const json& devices = field(doc, "devices", "fleet");
  if (!devices.is_array()) schema_error("fleet devices must be an array");
  std::vector<DeviceProfile> profiles;
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const json& d = devices[i];
    std::string what = "device #" + std::to_string(i);
    require_object(d, what);
    DeviceProfile p;
    p.id = string_field(d, "id", what);
    what = "device '" + p.id + "'";
    reject_unknown_fields(d, {"id", "compute_throughput", "mem_bandwidth", "net_bandwidth"}, what);
    p.compute_throughput = number_field(d, "compute_throughput", what);
    p.mem_bandwidth = number_field(d, "mem_bandwidth", what);
    p.net_bandwidth = number_field(d, "net_bandwidth", what);
    profiles.push_back(std::move(p));
  }
  return DeviceFleet(std::move(profiles));
}

std::map<std::string, double> parse_profile(const json& doc) {
  require_object(doc, "profile");
  reject_unknown_fields(doc, {"measured_costs_us"}, "profile");
  const json& costs = field(doc, "measured_costs_us", "profile");
  require_object(costs, "measured_costs_us");
  std::map<std::string, double> profile;
  for (const auto& item : costs.items()) {
    if (!item.value().is_number())
      schema_error("measured cost of '" + item.key() + "' must be a number", {item.key()});
    profile[item.key()] = item.value().get<double>();
  }
  return profile;
}

void apply_profile(GraphData& graph, const std::map<std::string, double>& profile) {
  std::set<std::string> used;
  for (auto& node : graph.nodes) {
    if (auto it = profile.find(node.id.str()); it != profile.end()) {
      node.measured_cost_us = it->second;
      used.insert(it->first);
    }
  }
  for (const auto& [id, cost] : profile)
    if (!used.contains(id))
      throw Error(Errc::unknown_node, "profile names unknown node '" + id + "'", {id});
}

std::vector<DeviceIndex> parse_assignment(const json& doc, const CostedGraph& costed) {
  require_object(doc, "assignment");
  const auto& g = costed.graph();
  std::vector<std::optional<DeviceIndex>> seen(g.node_count());
  for (const auto& item : doc.items()) {
    auto node = g.find_text(item.key());
    if (!node)
      throw Error(Errc::unknown_node, "assignment names unknown node '" + item.key() + "'",
                  {item.key()});
    if (!item.value().is_string())
      schema_error("device of node '" + item.key() + "' must be a string", {item.key()});
    seen[*node] = costed.fleet().index_of(item.value().get<std::string>());
  }
  std::vector<DeviceIndex> placement(g.node_count());
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    if (!seen[v])
      throw Error(Errc::unknown_node, "assignment does not place node '" + g.node(v).id.str() + "'",
                  {g.node(v).id.str()});
    placement[v] = *seen[v];
  }
  return placement;
}

json assignment_to_json(const CostedGraph& costed, const Assignment& assignment) {
  json doc = json::object();
  for (NodeIndex v = 0; v < costed.node_count(); ++v)
    doc[costed.graph().node(v).id.str()] = costed.fleet()[assignment.device_of(v)].id;
  return doc;
}

std::vector<std::optional<BottleneckTag>> parse_tags(const json& doc, const CostedGraph& costed) {
  require_object(doc, "tags");
  std::vector<std::optional<BottleneckTag>> tags(costed.node_count());
  for (const auto& item : doc.items()) {
    auto node = costed.graph().find_text(item.key());
    if (!node)
      throw Error(Errc::unknown_node, "tags name unknown node '" + item.key() + "'", {item.key()});
    std::optional<BottleneckTag> tag;
    if (item.value().is_string()) tag = parse_bottleneck_tag(item.value().get<std::string>());
    if (!tag) schema_error("tag of node '" + item.key() + "' is not a known tag", {item.key()});
    tags[*node] = tag;
  }
  return tags;
}

json graph_to_json(const GraphData& graph) {
  json nodes = json::array();
  for (const auto& n : graph.nodes) {
    json j{{"id", node_id_to_json(n.id)},
           {"op_kind", to_string(n.op_kind)},
           {"op_count", n.op_count},
           {"bytes_touched", n.bytes_touched},
           {"stateful", n.stateful()}};
    if (n.measured_cost_us) j["measured_cost_us"] = *n.measured_cost_us;
    nodes.push_back(std::move(j));
  }
  json edges = json::array();
  for (const auto& e : graph.edges)
    edges.push_back({{"src", node_id_to_json(e.src)},
                     {"dst", node_id_to_json(e.dst)},
                     {"kind", to_string(e.kind)},
                     {"bytes", e.bytes}});
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

json fleet_to_json(const DeviceFleet& fleet) {
  json devices = json::array();
  for (const auto& d : fleet.devices())
    devices.push_back({{"id", d.id},
                       {"compute_throughput", d.compute_throughput},
                       {"mem_bandwidth", d.mem_bandwidth},
                       {"net_bandwidth", d.net_bandwidth}});
  return {{"devices", std::move(devices)}};
}

nlohmann::ordered_json to_json(const CostedGraph& costed, const MoveRecord& move) {
  nlohmann::ordered_json j;
  j["node"] = node_id_to_json(costed.graph().node(move.node).id);
  j["from"] = costed.fleet()[move.from].id;
  j["to"] = costed.fleet()[move.to].id;
  j["kind"] = to_string(move.kind);
  j["gain_before"] = move.gain_before;
  j["gain_after"] = move.gain_after;
  j["pass"] = move.pass_index;
  return j;
}

nlohmann::ordered_json to_json(const CostedGraph& costed, const SimEvent& event) {
  nlohmann::ordered_json j;
  j["t"] = event.t;
  j["kind"] = to_string(event.kind);
  j["device"] = event.device ? json(costed.fleet()[*event.device].id) : json(nullptr);
  j["node"] = event.node ? node_id_to_json(costed.graph().node(*event.node).id) : json(nullptr);
  j["resource"] = event.resource ? json(to_string(*event.resource)) : json(nullptr);
  j["utilization"] = event.utilization ? json(*event.utilization) : json(nullptr);
  return j;
}

std::string move_log_jsonl(const CostedGraph& costed, std::span<const MoveRecord> moves) {
  std::string out;
  for (const auto& m : moves) out += to_json(costed, m).dump() + "\n";
  return out;
}

std::string trace_jsonl(const CostedGraph& costed, const SimTrace& trace) {
  std::string out;
  for (const auto& e : trace.events) out += to_json(costed, e).dump() + "\n";
  return out;
}

std::string to_dot(const CostedGraph& costed, const Assignment& assignment) {
  static constexpr const char* kPalette[] = {"lightblue", "lightsalmon", "palegreen", "khaki",
                                             "plum",      "lightgray",   "lightpink", "wheat"};
  const auto& g = costed.graph();
  std::ostringstream dot;
  dot << "digraph dataflow {\n  node [style=filled];\n";
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    const DeviceIndex d = assignment.device_of(v);
    dot << "  " << json(g.node(v).id.str()).dump() << " [fillcolor=\"" << kPalette[d % 8]
        << "\", tooltip=" << json(costed.fleet()[d].id).dump() << "];\n";
  }
  for (const auto& e : g.edges()) {
    dot << "  " << json(g.node(e.src).id.str()).dump() << " -> "
        << json(g.node(e.dst).id.str()).dump() << " [label=\"" << e.bytes << "\"";
    if (e.kind == EdgeKind::control) dot << ", style=dashed";
    dot << "];\n";
  }
  dot << "}\n";
  return dot.str();
}

}  // namespace dfpart::io
