#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "dfpart/error.hpp"

namespace dfpart {

using NodeIndex = std::uint32_t;
using DeviceIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;

/// Node identifier: either an integer or a string, as given by the producer.
/// Integers order before strings; integers compare numerically, strings
/// lexicographically.
class NodeId {
 public:
  NodeId() = default;
  NodeId(std::int64_t value) : value_(value) {}
  NodeId(int value) : value_(std::int64_t{value}) {}
  NodeId(std::string value) : value_(std::move(value)) {}
  NodeId(const char* value) : value_(std::string(value)) {}

  bool is_integer() const noexcept { return std::holds_alternative<std::int64_t>(value_); }
  std::int64_t as_integer() const { return std::get<std::int64_t>(value_); }
  const std::string& as_string() const { return std::get<std::string>(value_); }

  /// Textual form used for JSON object keys and diagnostics.
  std::string str() const;

  friend bool operator==(const NodeId&, const NodeId&) = default;
  friend std::strong_ordering operator<=>(const NodeId& a, const NodeId& b);

 private:
  std::variant<std::int64_t, std::string> value_{std::int64_t{0}};
};

enum class OpKind { matmul, conv2d, elementwise, reduction, variable, opaque };
enum class Statefulness { stateless, stateful };
enum class EdgeKind { data, control };

std::string_view to_string(OpKind kind);
std::optional<OpKind> parse_op_kind(std::string_view text);
std::string_view to_string(EdgeKind kind);
std::optional<EdgeKind> parse_edge_kind(std::string_view text);

struct OperatorNode {
  NodeId id;
  OpKind op_kind = OpKind::opaque;
  std::int64_t op_count = 0;
  std::int64_t bytes_touched = 0;
  Statefulness statefulness = Statefulness::stateless;
  /// Profiled execution time in microseconds; wins over the analytical cost.
  std::optional<double> measured_cost_us;

  bool stateful() const noexcept { return statefulness == Statefulness::stateful; }
  friend bool operator==(const OperatorNode&, const OperatorNode&) = default;
};

struct Edge {
  NodeId src;
  NodeId dst;
  EdgeKind kind = EdgeKind::data;
  std::int64_t bytes = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Unvalidated graph as read from a file or built by hand.
struct GraphData {
  std::vector<OperatorNode> nodes;
  std::vector<Edge> edges;

  friend bool operator==(const GraphData&, const GraphData&) = default;
};

/// Edge with endpoints resolved to dense node indices.
struct IndexedEdge {
  NodeIndex src;
  NodeIndex dst;
  EdgeKind kind;
  std::int64_t bytes;
};

/// A validated, immutable dataflow graph.
///
/// Nodes are indexed densely in ascending NodeId order, so comparing indices
/// is the same as comparing ids. Every tie-break downstream relies on that.
class DataflowGraph {
 public:
  DataflowGraph() = default;

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const OperatorNode& node(NodeIndex index) const { return nodes_[index]; }
  std::span<const OperatorNode> nodes() const noexcept { return nodes_; }
  std::span<const IndexedEdge> edges() const noexcept { return edges_; }
  std::span<const EdgeIndex> in_edges(NodeIndex index) const;
  std::span<const EdgeIndex> out_edges(NodeIndex index) const;

  std::optional<NodeIndex> find(const NodeId& id) const;
  /// Looks a node up by its textual id (JSON object keys).
  std::optional<NodeIndex> find_text(std::string_view text) const;
  /// Throws Error(unknown_node) when absent.
  NodeIndex index_of(const NodeId& id) const;

  /// Deterministic topological order (Kahn, smallest ready index first).
  std::span<const NodeIndex> topological_order() const noexcept { return topo_; }

  /// The graph exactly as it was validated.
  const GraphData& data() const noexcept { return data_; }

 private:
  friend DataflowGraph validate_graph(GraphData data);

  GraphData data_;
  std::vector<OperatorNode> nodes_;
  std::vector<IndexedEdge> edges_;
  std::vector<EdgeIndex> in_offsets_, in_list_;
  std::vector<EdgeIndex> out_offsets_, out_list_;
  std::unordered_map<std::string, NodeIndex> by_text_;
  std::vector<NodeIndex> topo_;
};

/// Checks every structural invariant and builds the indexed graph.
/// Throws Error with dangling_edge, cycle_detected, negative_weight,
/// control_edge_with_bytes, self_loop, duplicate_node or variable_not_stateful.
DataflowGraph validate_graph(GraphData data);
DataflowGraph validate_graph(const DataflowGraph& graph);

std::vector<NodeId> topological_sort(const DataflowGraph& graph);
/// Validates first, so a cyclic input raises cycle_detected.
std::vector<NodeId> topological_sort(const GraphData& data);

}  // namespace dfpart
