#include "dfpart/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace dfpart {

DeviceFleet::DeviceFleet(std::vector<DeviceProfile> devices) : devices_(std::move(devices)) {
  if (devices_.empty()) throw Error(Errc::invalid_device, "fleet has no devices");
  std::unordered_set<std::string> seen;
  for (const auto& d : devices_) {
    if (!seen.insert(d.id).second)
      throw Error(Errc::invalid_device, "duplicate device id '" + d.id + "'", {d.id});
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(d.compute_throughput) || !positive(d.mem_bandwidth) ||
        !positive(d.net_bandwidth))
      throw Error(Errc::invalid_device, "device '" + d.id + "' has a non-positive rate", {d.id});
  }
}

std::optional<DeviceIndex> DeviceFleet::find(std::string_view id) const {
  for (DeviceIndex i = 0; i < devices_.size(); ++i)
    if (devices_[i].id == id) return i;
  return std::nullopt;
}

DeviceIndex DeviceFleet::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw Error(Errc::unknown_device, "unknown device '" + std::string(id) + "'",
              {std::string(id)});
}

DeviceProfile DeviceFleet::average() const {
  DeviceProfile avg{"average", 0.0, 0.0, 0.0};
  for (const auto& d : devices_) {
    avg.compute_throughput += d.compute_throughput;
    avg.mem_bandwidth += d.mem_bandwidth;
    avg.net_bandwidth += d.net_bandwidth;
  }
  const double k = static_cast<double>(devices_.size());
  avg.compute_throughput /= k;
  avg.mem_bandwidth /= k;
  avg.net_bandwidth /= k;
  return avg;
}

std::string_view to_string(BottleneckTag tag) {
  switch (tag) {
    case BottleneckTag::compute_bound: return "compute_bound";
    case BottleneckTag::memory_bound: return "memory_bound";
    case BottleneckTag::network_bound: return "network_bound";
  }
  return "compute_bound";
}

std::optional<BottleneckTag> parse_bottleneck_tag(std::string_view text) {
  if (text == "compute_bound") return BottleneckTag::compute_bound;
  if (text == "memory_bound") return BottleneckTag::memory_bound;
  if (text == "network_bound") return BottleneckTag::network_bound;
  return std::nullopt;
}

double compute_cost(const OperatorNode& node, const DeviceProfile& device) {
  if (node.measured_cost_us) return *node.measured_cost_us;
  return static_cast<double>(node.op_count) / device.compute_throughput;
}

CostedGraph::CostedGraph(DataflowGraph graph, DeviceFleet fleet)
    : graph_(std::move(graph)), fleet_(std::move(fleet)) {
  const std::size_t k = fleet_.size();
  costs_.resize(graph_.node_count() * k);
  totals_.assign(k, 0.0);
  for (NodeIndex v = 0; v < graph_.node_count(); ++v) {
    for (DeviceIndex d = 0; d < k; ++d) {
      const double c = compute_cost(graph_.node(v), fleet_[d]);
      costs_[static_cast<std::size_t>(v) * k + d] = c;
      totals_[d] += c;
    }
  }
}

CostedGraph cost_graph(DataflowGraph graph, DeviceFleet fleet) {
  return CostedGraph(std::move(graph), std::move(fleet));
}

std::vector<NodeIndex> select_relocatable(const CostedGraph& costed,
                                          std::string_view reference_device,
                                          double expensive_fraction) {
  const DeviceIndex ref = costed.fleet().index_of(reference_device);
  if (!(expensive_fraction > 0.0 && expensive_fraction <= 1.0))
    throw Error(Errc::invalid_config, "expensive fraction must lie in (0, 1]");

  std::vector<NodeIndex> ranked(costed.node_count());
  std::iota(ranked.begin(), ranked.end(), NodeIndex{0});
  std::stable_sort(ranked.begin(), ranked.end(), [&](NodeIndex a, NodeIndex b) {
    return costed.cost(a, ref) > costed.cost(b, ref);
  });

  const double budget = expensive_fraction * costed.total_cost_on(ref);
  double cumulative = 0.0;
  std::vector<NodeIndex> selected;
  for (NodeIndex v : ranked) {
    if (cumulative >= budget) break;
    cumulative += costed.cost(v, ref);
    if (!costed.graph().node(v).stateful()) selected.push_back(v);
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

std::int64_t incident_bytes(const DataflowGraph& graph, NodeIndex node) {
  std::int64_t total = 0;
  for (EdgeIndex e : graph.in_edges(node)) total += graph.edges()[e].bytes;
  for (EdgeIndex e : graph.out_edges(node)) total += graph.edges()[e].bytes;
  return total;
}

std::vector<BottleneckTag> tag_nodes(const CostedGraph& costed) {
  const DeviceProfile avg = costed.fleet().average();
  const auto& g = costed.graph();
  std::vector<BottleneckTag> tags(g.node_count());
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    const auto& n = g.node(v);
    const double compute = static_cast<double>(n.op_count) / avg.compute_throughput;
    const double memory = static_cast<double>(n.bytes_touched) / avg.mem_bandwidth;
    const double network = static_cast<double>(incident_bytes(g, v)) / avg.net_bandwidth;
    if (compute >= memory && compute >= network)
      tags[v] = BottleneckTag::compute_bound;
    else if (memory >= network)
      tags[v] = BottleneckTag::memory_bound;
    else
      tags[v] = BottleneckTag::network_bound;
  }
  return tags;
}

}  // namespace dfpart
