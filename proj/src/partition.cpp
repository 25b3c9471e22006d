#include "dfpart/partition.hpp"

#include "dfpart/prng.hpp"

namespace dfpart {

Assignment::Assignment(const CostedGraph& costed, std::vector<DeviceIndex> placement)
    : placement_(std::move(placement)), loads_(costed.device_count(), 0.0) {
  if (placement_.size() != costed.node_count())
    throw Error(Errc::unknown_node, "assignment does not cover every node");
  for (NodeIndex v = 0; v < placement_.size(); ++v) {
    if (placement_[v] >= loads_.size())
      throw Error(Errc::unknown_device, "placement names a device outside the fleet");
    loads_[placement_[v]] += costed.cost(v, placement_[v]);
  }
  for (double l : loads_) total_ += l;
}

void Assignment::move(NodeIndex node, DeviceIndex to, const CostedGraph& costed) {
  const DeviceIndex from = placement_[node];
  if (from == to) return;
  const double before = costed.cost(node, from);
  const double after = costed.cost(node, to);
  loads_[from] -= before;
  loads_[to] += after;
  total_ += after - before;
  placement_[node] = to;
}

Assignment block_partition(const CostedGraph& costed) {
  const auto k = static_cast<DeviceIndex>(costed.device_count());
  const double share = costed.total_cost_on(0) / static_cast<double>(k);
  std::vector<DeviceIndex> placement(costed.node_count(), 0);

  DeviceIndex device = 0;
  double cumulative = 0.0;
  for (NodeIndex v : costed.graph().topological_order()) {
    while (device + 1 < k && cumulative >= share * (device + 1)) ++device;
    placement[v] = device;
    cumulative += costed.cost(v, device);
  }
  return Assignment(costed, std::move(placement));
}

Assignment random_partition(const CostedGraph& costed, std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  const auto k = static_cast<std::uint64_t>(costed.device_count());
  std::vector<DeviceIndex> placement(costed.node_count());
  for (auto& device : placement) device = static_cast<DeviceIndex>(rng.uniform_index(k));
  return Assignment(costed, std::move(placement));
}

std::int64_t cut_size(const CostedGraph& costed, const Assignment& assignment) {
  std::int64_t cut = 0;
  for (const auto& e : costed.graph().edges())
    if (assignment.device_of(e.src) != assignment.device_of(e.dst)) cut += e.bytes;
  return cut;
}

}  // namespace dfpart
