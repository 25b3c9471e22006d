#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "dfpart/partition.hpp"

namespace dfpart {

enum class Resource : std::uint8_t { compute = 0, memory = 1, network = 2 };
inline constexpr std::size_t kResourceCount = 3;
inline constexpr std::array<Resource, kResourceCount> kResources{
    Resource::compute, Resource::memory, Resource::network};

std::string_view to_string(Resource resource);
Resource resource_of(BottleneckTag tag);

struct SimConfig {
  double theta = 0.95;  // overload threshold, (0, 1]
  double gamma = 0.50;  // underload threshold, [0, 1)
  double window = 10.0;  // time units per utilization sample
  int cooldown = 2;      // windows a freshly acquired node stays put
  double horizon = 100.0;
  /// Training steps offered to every device per window. A device's busy time
  /// in a window is steps_per_window times the per-step work of its residents.
  int steps_per_window = 1;
  /// Amplitude of multiplicative utilization noise from co-located work,
  /// drawn per (window, device, resource) from the simulation seed. 0 = none.
  double interference = 0.0;
};

/// Throws Error(invalid_config) unless 0 <= gamma < theta <= 1, window > 0,
/// horizon > 0, cooldown >= 0, steps_per_window >= 1, interference in [0, 1].
void validate(const SimConfig& config);

enum class EventKind { window_sample, outbox_put, outbox_take, step_complete };

std::string_view to_string(EventKind kind);

struct SimEvent {
  double t = 0.0;
  EventKind kind = EventKind::window_sample;
  std::optional<DeviceIndex> device;
  std::optional<NodeIndex> node;
  std::optional<Resource> resource;
  std::optional<double> utilization;

  friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

struct SimTrace {
  std::vector<SimEvent> events;
};

struct DeviceState {
  DeviceIndex device = 0;
  std::set<NodeIndex> resident;
  std::array<std::optional<NodeIndex>, kResourceCount> outbox{};
  /// Window boundary at which each out-box was filled.
  std::array<std::size_t, kResourceCount> outbox_since{};
  std::array<double, kResourceCount> utilization{};
};

/// Shared state the threshold rules read at a window boundary.
struct RuleContext {
  const CostedGraph& costed;
  std::span<const std::optional<BottleneckTag>> tags;
  const std::vector<bool>& relocatable;  // per node
  /// First boundary at which a node may be out-boxed again (cooldown).
  std::span<std::size_t> eligible_from;
  std::size_t boundary = 0;  // index of the window that just ended
  double time = 0.0;
};

/// Out-boxes the highest-cost resident relocatable node tagged for `resource`
/// (ties: lowest id, skipping nodes in cooldown) when the device's utilization
/// of that resource exceeds theta and its out-box is empty.
std::optional<SimEvent> overload_rule(DeviceState& device, Resource resource,
                                      const RuleContext& context, const SimConfig& config);

/// When the device's utilization of `resource` is below gamma, claims the node
/// in the matching out-box of the most utilized peer (ties: lowest index).
std::optional<SimEvent> underload_rule(DeviceState& device, std::span<DeviceState> devices,
                                       Resource resource, RuleContext& context,
                                       const SimConfig& config);

struct SimResult {
  Assignment assignment;
  SimTrace trace;
  std::size_t migrations = 0;
};

/// Runs the scheduling-assistant loop until the horizon.
///
/// Every window each device samples per-resource utilization, then all
/// overload rules fire (devices ascending, resources compute/memory/network),
/// then all underload rules in the same order. A node left unclaimed in an
/// out-box for one further window goes back to its device; at the horizon all
/// out-boxed nodes go back. Throws Error(untagged_relocatable_node).
SimResult simulate(const CostedGraph& costed, std::span<const std::optional<BottleneckTag>> tags,
                   const Assignment& assignment, std::span<const NodeIndex> relocatable,
                   const SimConfig& config, std::uint64_t seed);

SimResult simulate(const CostedGraph& costed, std::span<const BottleneckTag> tags,
                   const Assignment& assignment, std::span<const NodeIndex> relocatable,
                   const SimConfig& config, std::uint64_t seed);

/// Per-step critical device time: max over devices of resident compute time
/// plus cut-edge bytes touching the device over its network bandwidth.
double makespan(const CostedGraph& costed, const Assignment& assignment);

}  // namespace dfpart
