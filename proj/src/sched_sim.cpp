#include "dfpart/sched_sim.hpp"

#include <algorithm>

#include "dfpart/prng.hpp"

namespace dfpart {

std::string_view to_string(Resource resource) {
  switch (resource) {
    case Resource::compute: return "compute";
    case Resource::memory: return "memory";
    case Resource::network: return "network";
  }
  return "compute";
}

Resource resource_of(BottleneckTag tag) {
  switch (tag) {
    case BottleneckTag::compute_bound: return Resource::compute;
    case BottleneckTag::memory_bound: return Resource::memory;
    case BottleneckTag::network_bound: return Resource::network;
  }
  return Resource::compute;
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::window_sample: return "window_sample";
    case EventKind::outbox_put: return "outbox_put";
    case EventKind::outbox_take: return "outbox_take";
    case EventKind::step_complete: return "step_complete";
  }
  return "window_sample";
}

void validate(const SimConfig& c) {
  auto fail = [](const char* what) { throw Error(Errc::invalid_config, what); };
  if (!(c.theta > 0.0 && c.theta <= 1.0)) fail("theta must lie in (0, 1]");
  if (!(c.gamma >= 0.0 && c.gamma < 1.0)) fail("gamma must lie in [0, 1)");
  if (!(c.gamma < c.theta)) fail("gamma must be below theta");
  if (!(c.window > 0.0)) fail("window must be positive");
  if (!(c.horizon > 0.0)) fail("horizon must be positive");
  if (c.cooldown < 0) fail("cooldown must be non-negative");
  if (c.steps_per_window < 1) fail("steps_per_window must be at least 1");
  if (!(c.interference >= 0.0 && c.interference <= 1.0)) fail("interference must lie in [0, 1]");
}

namespace {

constexpr std::size_t slot(Resource r) { return static_cast<std::size_t>(r); }

// Per-step busy time of every device for each resource. Out-boxed nodes do no
// work and their edges carry no traffic.
std::vector<std::array<double, kResourceCount>> step_work(const CostedGraph& costed,
                                                          std::span<const DeviceState> devices,
                                                          std::span<const std::int64_t> where) {
  const auto& g = costed.graph();
  std::vector<std::array<double, kResourceCount>> work(devices.size(), {0.0, 0.0, 0.0});
  for (const auto& state : devices) {
    const DeviceIndex d = state.device;
    const auto& profile = costed.fleet()[d];
    for (NodeIndex v : state.resident) {
      work[d][slot(Resource::compute)] += costed.cost(v, d);
      work[d][slot(Resource::memory)] +=
          static_cast<double>(g.node(v).bytes_touched) / profile.mem_bandwidth;
    }
  }
  for (const auto& e : g.edges()) {
    if (e.kind != EdgeKind::data) continue;
    const std::int64_t a = where[e.src];
    const std::int64_t b = where[e.dst];
    if (a < 0 || b < 0 || a == b) continue;
    for (auto d : {a, b})
      work[d][slot(Resource::network)] +=
          static_cast<double>(e.bytes) / costed.fleet()[static_cast<DeviceIndex>(d)].net_bandwidth;
  }
  return work;
}

}  // namespace

std::optional<SimEvent> overload_rule(DeviceState& device, Resource resource,
                                      const RuleContext& context, const SimConfig& config) {
  const std::size_t r = slot(resource);
  if (!(device.utilization[r] > config.theta) || device.outbox[r]) return std::nullopt;

  std::optional<NodeIndex> victim;
  double victim_cost = 0.0;
  for (NodeIndex v : device.resident) {  // ascending, so ties keep the lowest id
    if (!context.relocatable[v] || !context.tags[v] || resource_of(*context.tags[v]) != resource)
      continue;
    if (context.boundary < context.eligible_from[v]) continue;
    const double c = context.costed.cost(v, device.device);
    if (!victim || c > victim_cost) {
      victim = v;
      victim_cost = c;
    }
  }
  if (!victim) return std::nullopt;

  device.resident.erase(*victim);
  device.outbox[r] = *victim;
  device.outbox_since[r] = context.boundary;
  return SimEvent{context.time, EventKind::outbox_put, device.device, *victim, resource,
                  device.utilization[r]};
}

std::optional<SimEvent> underload_rule(DeviceState& device, std::span<DeviceState> devices,
                                       Resource resource, RuleContext& context,
                                       const SimConfig& config) {
  const std::size_t r = slot(resource);
  if (!(device.utilization[r] < config.gamma)) return std::nullopt;

  DeviceState* donor = nullptr;
  for (auto& peer : devices) {
    if (peer.device == device.device || !peer.outbox[r]) continue;
    if (!donor || peer.utilization[r] > donor->utilization[r]) donor = &peer;
  }
  if (!donor) return std::nullopt;

  const NodeIndex node = *donor->outbox[r];
  donor->outbox[r].reset();
  device.resident.insert(node);
  context.eligible_from[node] =
      context.boundary + static_cast<std::size_t>(std::max(config.cooldown, 1));
  return SimEvent{context.time, EventKind::outbox_take, device.device, node, resource,
                  device.utilization[r]};
}

SimResult simulate(const CostedGraph& costed, std::span<const std::optional<BottleneckTag>> tags,
                   const Assignment& assignment, std::span<const NodeIndex> relocatable,
                   const SimConfig& config, std::uint64_t seed) {
  validate(config);
  const std::size_t n = costed.node_count();
  const std::size_t k = costed.device_count();
  if (assignment.node_count() != n || assignment.device_count() != k)
    throw Error(Errc::invalid_config, "assignment does not match the costed graph");
  if (tags.size() != n) throw Error(Errc::invalid_config, "tag table does not match the graph");

  std::vector<bool> movable(n, false);
  for (NodeIndex v : relocatable) {
    movable[v] = true;
    if (!tags[v]) {
      const std::string id = costed.graph().node(v).id.str();
      throw Error(Errc::untagged_relocatable_node, "relocatable node '" + id + "' has no tag",
                  {id});
    }
  }

  std::vector<DeviceState> devices(k);
  std::vector<std::int64_t> where(n);
  for (DeviceIndex d = 0; d < k; ++d) devices[d].device = d;
  for (NodeIndex v = 0; v < n; ++v) {
    devices[assignment.device_of(v)].resident.insert(v);
    where[v] = assignment.device_of(v);
  }
  std::vector<std::size_t> eligible_from(n, 0);

  SimResult result;
  auto& events = result.trace.events;
  Xoshiro256StarStar rng(seed);
  const auto windows = static_cast<std::size_t>(config.horizon / config.window);

  auto refresh_location = [&] {
    std::fill(where.begin(), where.end(), -1);
    for (const auto& s : devices)
      for (NodeIndex v : s.resident) where[v] = s.device;
  };

  for (std::size_t w = 0; w < windows; ++w) {
    const double start = static_cast<double>(w) * config.window;
    const double end = static_cast<double>(w + 1) * config.window;

    refresh_location();
    const auto work = step_work(costed, devices, where);
    for (int s = 0; s < config.steps_per_window; ++s) {
      const double t = start + config.window * static_cast<double>(s + 1) /
                                   static_cast<double>(config.steps_per_window);
      events.push_back({t, EventKind::step_complete, std::nullopt, std::nullopt, std::nullopt,
                        std::nullopt});
    }

    for (auto& state : devices) {
      for (Resource res : kResources) {
        const std::size_t r = slot(res);
        double u = static_cast<double>(config.steps_per_window) * work[state.device][r] /
                   config.window;
        const double noise = 1.0 + config.interference * (2.0 * rng.uniform_unit() - 1.0);
        u = std::clamp(u * noise, 0.0, 1.0);
        state.utilization[r] = u;
        events.push_back({end, EventKind::window_sample, state.device, std::nullopt, res, u});
      }
    }

    if (k < 2) continue;  // no peer to trade with
    RuleContext context{costed, tags, movable, eligible_from, w, end};
    for (auto& state : devices)
      for (Resource res : kResources)
        if (auto e = overload_rule(state, res, context, config)) events.push_back(*e);
    for (auto& state : devices)
      for (Resource res : kResources)
        if (auto e = underload_rule(state, devices, res, context, config)) {
          events.push_back(*e);
          ++result.migrations;
        }

    // Unclaimed for a full window: back to the device that published it.
    for (auto& state : devices)
      for (std::size_t r = 0; r < kResourceCount; ++r)
        if (state.outbox[r] && state.outbox_since[r] < w) {
          state.resident.insert(*state.outbox[r]);
          state.outbox[r].reset();
        }
  }

  std::vector<DeviceIndex> placement(n);
  for (const auto& state : devices) {
    for (NodeIndex v : state.resident) placement[v] = state.device;
    for (const auto& boxed : state.outbox)
      if (boxed) placement[*boxed] = state.device;
  }
  result.assignment = Assignment(costed, std::move(placement));
  return result;
}

SimResult simulate(const CostedGraph& costed, std::span<const BottleneckTag> tags,
                   const Assignment& assignment, std::span<const NodeIndex> relocatable,
                   const SimConfig& config, std::uint64_t seed) {
  std::vector<std::optional<BottleneckTag>> optional_tags(tags.begin(), tags.end());
  return simulate(costed, optional_tags, assignment, relocatable, config, seed);
}

double makespan(const CostedGraph& costed, const Assignment& assignment) {
  const std::size_t k = costed.device_count();
  std::vector<double> time(assignment.loads().begin(), assignment.loads().end());
  for (const auto& e : costed.graph().edges()) {
    if (e.kind != EdgeKind::data) continue;
    const DeviceIndex a = assignment.device_of(e.src);
    const DeviceIndex b = assignment.device_of(e.dst);
    if (a == b) continue;
    time[a] += static_cast<double>(e.bytes) / costed.fleet()[a].net_bandwidth;
    time[b] += static_cast<double>(e.bytes) / costed.fleet()[b].net_bandwidth;
  }
  double worst = 0.0;
  for (std::size_t d = 0; d < k; ++d) worst = std::max(worst, time[d]);
  return worst;
}

}  // namespace dfpart
