#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dfpart/graph.hpp"

namespace dfpart {

/// One compute device. Rates are per time unit; one time unit is one
/// microsecond, so profiled costs plug in unchanged.
struct DeviceProfile {
  std::string id;
  double compute_throughput = 1.0;  // ops per time unit
  double mem_bandwidth = 1.0;       // bytes per time unit
  double net_bandwidth = 1.0;       // bytes per time unit

  friend bool operator==(const DeviceProfile&, const DeviceProfile&) = default;
};

/// Ordered, non-empty list of devices with unique ids and positive rates.
class DeviceFleet {
 public:
  DeviceFleet() = default;
  /// Throws Error(invalid_device) on an empty fleet, duplicate ids or a
  /// non-positive rate.
  explicit DeviceFleet(std::vector<DeviceProfile> devices);

  std::size_t size() const noexcept { return devices_.size(); }
  const DeviceProfile& operator[](DeviceIndex i) const { return devices_[i]; }
  std::span<const DeviceProfile> devices() const noexcept { return devices_; }

  std::optional<DeviceIndex> find(std::string_view id) const;
  /// Throws Error(unknown_device).
  DeviceIndex index_of(std::string_view id) const;

  /// Device whose rates are the arithmetic means of the fleet's.
  DeviceProfile average() const;

 private:
  std::vector<DeviceProfile> devices_;
};

enum class BottleneckTag { compute_bound, memory_bound, network_bound };

std::string_view to_string(BottleneckTag tag);
std::optional<BottleneckTag> parse_bottleneck_tag(std::string_view text);

/// Time units to run `node` on `device`: the profiled cost when present,
/// otherwise op_count / compute_throughput.
double compute_cost(const OperatorNode& node, const DeviceProfile& device);

/// Graph plus a dense node x device cost table.
class CostedGraph {
 public:
  CostedGraph() = default;
  CostedGraph(DataflowGraph graph, DeviceFleet fleet);

  const DataflowGraph& graph() const noexcept { return graph_; }
  const DeviceFleet& fleet() const noexcept { return fleet_; }
  std::size_t node_count() const noexcept { return graph_.node_count(); }
  std::size_t device_count() const noexcept { return fleet_.size(); }

  double cost(NodeIndex node, DeviceIndex device) const {
    return costs_[static_cast<std::size_t>(node) * fleet_.size() + device];
  }
  /// Sum of node costs if the whole graph ran on `device`.
  double total_cost_on(DeviceIndex device) const { return totals_[device]; }

 private:
  DataflowGraph graph_;
  DeviceFleet fleet_;
  std::vector<double> costs_;
  std::vector<double> totals_;
};

CostedGraph cost_graph(DataflowGraph graph, DeviceFleet fleet);

/// Stateless nodes among the most expensive ones on `reference_device`.
///
/// Nodes are ranked by descending cost (ties by ascending id) and the shortest
/// prefix whose cumulative cost reaches `expensive_fraction` of the total is
/// kept; stateful nodes are then dropped. Returns ascending node indices.
std::vector<NodeIndex> select_relocatable(const CostedGraph& costed,
                                          std::string_view reference_device,
                                          double expensive_fraction = 0.9);

/// Classifies each node by its largest roofline time on the fleet-average
/// device: compute (ops), memory (bytes touched) or network (incident data
/// bytes). Ties resolve compute, then memory, then network.
std::vector<BottleneckTag> tag_nodes(const CostedGraph& costed);

/// Total data bytes on edges incident to `node` (in and out).
std::int64_t incident_bytes(const DataflowGraph& graph, NodeIndex node);

}  // namespace dfpart
