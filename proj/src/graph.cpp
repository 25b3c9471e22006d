#include "dfpart/graph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>

namespace dfpart {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::dangling_edge: return "DanglingEdge";
    case Errc::cycle_detected: return "CycleDetected";
    case Errc::negative_weight: return "NegativeWeight";
    case Errc::control_edge_with_bytes: return "ControlEdgeWithBytes";
    case Errc::self_loop: return "SelfLoop";
    case Errc::duplicate_node: return "DuplicateNode";
    case Errc::variable_not_stateful: return "VariableNotStateful";
    case Errc::invalid_device: return "InvalidDevice";
    case Errc::unknown_device: return "UnknownDevice";
    case Errc::unknown_node: return "UnknownNode";
    case Errc::untagged_relocatable_node: return "UntaggedRelocatableNode";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::schema: return "Schema";
  }
  return "Unknown";
}

std::string NodeId::str() const {
  if (is_integer()) return std::to_string(as_integer());
  return as_string();
}

std::strong_ordering operator<=>(const NodeId& a, const NodeId& b) {
  if (a.value_.index() != b.value_.index()) return a.value_.index() <=> b.value_.index();
  if (a.is_integer()) return a.as_integer() <=> b.as_integer();
  int c = a.as_string().compare(b.as_string());
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

namespace {

constexpr std::pair<OpKind, std::string_view> kOpKindNames[] = {
    {OpKind::matmul, "matmul"},           {OpKind::conv2d, "conv2d"},
    {OpKind::elementwise, "elementwise"}, {OpKind::reduction, "reduction"},
    {OpKind::variable, "variable"},       {OpKind::opaque, "opaque"},
};

// CSR adjacency from a per-edge key (src or dst).
void build_csr(std::size_t node_count, std::span<const IndexedEdge> edges,
               NodeIndex IndexedEdge::*end, std::vector<EdgeIndex>& offsets,
               std::vector<EdgeIndex>& list) {
  offsets.assign(node_count + 1, 0);
  for (const auto& e : edges) ++offsets[e.*end + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  list.resize(edges.size());
  std::vector<EdgeIndex> cursor(offsets.begin(), offsets.end() - 1);
  for (EdgeIndex i = 0; i < edges.size(); ++i) list[cursor[edges[i].*end]++] = i;
}

// Finds one directed cycle among nodes Kahn's algorithm could not retire.
std::vector<NodeIndex> find_cycle(const DataflowGraph& g, const std::vector<bool>& retired) {
  enum class Mark : std::uint8_t { white, grey, black };
  std::vector<Mark> mark(g.node_count(), Mark::white);
  std::vector<NodeIndex> stack;
  std::vector<NodeIndex> cycle;

  std::function<bool(NodeIndex)> visit = [&](NodeIndex v) {
    mark[v] = Mark::grey;
    stack.push_back(v);
    for (EdgeIndex e : g.out_edges(v)) {
      NodeIndex w = g.edges()[e].dst;
      if (retired[w]) continue;
      if (mark[w] == Mark::grey) {
        auto it = std::find(stack.begin(), stack.end(), w);
        cycle.assign(it, stack.end());
        return true;
      }
      if (mark[w] == Mark::white && visit(w)) return true;
    }
    stack.pop_back();
    mark[v] = Mark::black;
    return false;
  };

  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    if (!retired[v] && mark[v] == Mark::white && visit(v)) break;
  }
  return cycle;
}

}  // namespace

std::string_view to_string(OpKind kind) {
  for (auto [k, name] : kOpKindNames)
    if (k == kind) return name;
  return "opaque";
}

std::optional<OpKind> parse_op_kind(std::string_view text) {
  for (auto [k, name] : kOpKindNames)
    if (name == text) return k;
  return std::nullopt;
}

std::string_view to_string(EdgeKind kind) { return kind == EdgeKind::data ? "data" : "control"; }

std::optional<EdgeKind> parse_edge_kind(std::string_view text) {
  if (text == "data") return EdgeKind::data;
  if (text == "control") return EdgeKind::control;
  return std::nullopt;
}

std::span<const EdgeIndex> DataflowGraph::in_edges(NodeIndex index) const {
  return std::span(in_list_).subspan(in_offsets_[index], in_offsets_[index + 1] - in_offsets_[index]);
}

std::span<const EdgeIndex> DataflowGraph::out_edges(NodeIndex index) const {
  return std::span(out_list_).subspan(out_offsets_[index],
                                      out_offsets_[index + 1] - out_offsets_[index]);
}

std::optional<NodeIndex> DataflowGraph::find(const NodeId& id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const OperatorNode& n, const NodeId& key) { return n.id < key; });
  if (it == nodes_.end() || it->id != id) return std::nullopt;
  return static_cast<NodeIndex>(it - nodes_.begin());
}

std::optional<NodeIndex> DataflowGraph::find_text(std::string_view text) const {
  auto it = by_text_.find(std::string(text));
  if (it == by_text_.end()) return std::nullopt;
  return it->second;
}

NodeIndex DataflowGraph::index_of(const NodeId& id) const {
  if (auto index = find(id)) return *index;
  throw Error(Errc::unknown_node, "unknown node '" + id.str() + "'", {id.str()});
}

DataflowGraph validate_graph(GraphData data) {
  DataflowGraph g;

  for (const auto& n : data.nodes) {
    if (n.op_count < 0 || n.bytes_touched < 0 || (n.measured_cost_us && *n.measured_cost_us < 0))
      throw Error(Errc::negative_weight, "node '" + n.id.str() + "' has a negative count",
                  {n.id.str()});
    if (n.op_kind == OpKind::variable && !n.stateful())
      throw Error(Errc::variable_not_stateful,
                  "variable node '" + n.id.str() + "' must be stateful", {n.id.str()});
  }

  g.nodes_ = data.nodes;
  std::sort(g.nodes_.begin(), g.nodes_.end(),
            [](const OperatorNode& a, const OperatorNode& b) { return a.id < b.id; });
  for (NodeIndex i = 0; i < g.nodes_.size(); ++i) {
    auto [it, inserted] = g.by_text_.emplace(g.nodes_[i].id.str(), i);
    if (!inserted)
      throw Error(Errc::duplicate_node, "duplicate node id '" + g.nodes_[i].id.str() + "'",
                  {g.nodes_[i].id.str()});
  }

  g.edges_.reserve(data.edges.size());
  for (const auto& e : data.edges) {
    const std::string label = e.src.str() + "->" + e.dst.str();
    auto src = g.find(e.src);
    auto dst = g.find(e.dst);
    if (!src || !dst)
      throw Error(Errc::dangling_edge, "edge " + label + " names an unknown node",
                  {e.src.str(), e.dst.str()});
    if (e.bytes < 0)
      throw Error(Errc::negative_weight, "edge " + label + " has negative bytes",
                  {e.src.str(), e.dst.str()});
    if (e.kind == EdgeKind::control && e.bytes != 0)
      throw Error(Errc::control_edge_with_bytes, "control edge " + label + " carries bytes",
                  {e.src.str(), e.dst.str()});
    if (*src == *dst)
      throw Error(Errc::self_loop, "edge " + label + " is a self-loop", {e.src.str()});
    g.edges_.push_back({*src, *dst, e.kind, e.bytes});
  }

  build_csr(g.nodes_.size(), g.edges_, &IndexedEdge::dst, g.in_offsets_, g.in_list_);
  build_csr(g.nodes_.size(), g.edges_, &IndexedEdge::src, g.out_offsets_, g.out_list_);

  // Kahn over data and control edges, smallest ready index first.
  std::vector<std::size_t> indegree(g.nodes_.size());
  for (NodeIndex v = 0; v < g.nodes_.size(); ++v) indegree[v] = g.in_edges(v).size();
  std::priority_queue<NodeIndex, std::vector<NodeIndex>, std::greater<>> ready;
  for (NodeIndex v = 0; v < g.nodes_.size(); ++v)
    if (indegree[v] == 0) ready.push(v);
  std::vector<bool> retired(g.nodes_.size(), false);
  g.topo_.reserve(g.nodes_.size());
  while (!ready.empty()) {
    NodeIndex v = ready.top();
    ready.pop();
    retired[v] = true;
    g.topo_.push_back(v);
    for (EdgeIndex e : g.out_edges(v))
      if (--indegree[g.edges_[e].dst] == 0) ready.push(g.edges_[e].dst);
  }
  if (g.topo_.size() != g.nodes_.size()) {
    std::vector<std::string> witness;
    for (NodeIndex v : find_cycle(g, retired)) witness.push_back(g.nodes_[v].id.str());
    std::string message = "cycle detected:";
    for (const auto& id : witness) message += " " + id;
    throw Error(Errc::cycle_detected, message, std::move(witness));
  }

  g.data_ = std::move(data);
  return g;
}

DataflowGraph validate_graph(const DataflowGraph& graph) { return validate_graph(graph.data()); }

std::vector<NodeId> topological_sort(const DataflowGraph& graph) {
  std::vector<NodeId> ids;
  ids.reserve(graph.node_count());
  for (NodeIndex v : graph.topological_order()) ids.push_back(graph.node(v).id);
  return ids;
}

std::vector<NodeId> topological_sort(const GraphData& data) {
  return topological_sort(validate_graph(data));
}

}  // namespace dfpart
