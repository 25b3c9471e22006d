#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dfpart/cost_model.hpp"

namespace dfpart {

/// Total node -> device map with cached per-device loads.
///
/// Loads are in time units, each node costed on the device it occupies.
class Assignment {
 public:
  Assignment() = default;
  /// Throws Error(unknown_device) if a placement names a device outside the
  /// fleet, Error(unknown_node) if the size does not match the graph.
  Assignment(const CostedGraph& costed, std::vector<DeviceIndex> placement);

  std::size_t node_count() const noexcept { return placement_.size(); }
  std::size_t device_count() const noexcept { return loads_.size(); }

  DeviceIndex device_of(NodeIndex node) const { return placement_[node]; }
  std::span<const DeviceIndex> placement() const noexcept { return placement_; }
  double load(DeviceIndex device) const { return loads_[device]; }
  std::span<const double> loads() const noexcept { return loads_; }
  double total_cost() const noexcept { return total_; }
  /// C / k.
  double ideal_share() const noexcept { return total_ / static_cast<double>(loads_.size()); }

  /// Relocates `node` and updates the load caches incrementally.
  void move(NodeIndex node, DeviceIndex to, const CostedGraph& costed);

  friend bool operator==(const Assignment& a, const Assignment& b) {
    return a.placement_ == b.placement_;
  }

 private:
  std::vector<DeviceIndex> placement_;
  std::vector<double> loads_;
  double total_ = 0.0;
};

/// Contiguous blocks of the topological order, one per device.
///
/// The fill target is C_ref / k with C_ref the total cost on the fleet's first
/// device. Device i keeps taking nodes until the cumulative load of devices
/// 1..i reaches i * C_ref / k; the last device takes the remainder.
Assignment block_partition(const CostedGraph& costed);

/// Each node, in ascending id order, draws its device with
/// Xoshiro256StarStar(seed).uniform_index(k).
Assignment random_partition(const CostedGraph& costed, std::uint64_t seed);

/// Bytes on edges whose endpoints sit on different devices.
std::int64_t cut_size(const CostedGraph& costed, const Assignment& assignment);

}  // namespace dfpart
