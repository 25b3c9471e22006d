#include "dfpart/refine.hpp"

#include <cmath>

namespace dfpart {

std::string_view to_string(GainVariant variant) {
  return variant == GainVariant::symmetric ? "symmetric" : "incoming_only";
}

std::optional<GainVariant> parse_gain_variant(std::string_view text) {
  if (text == "incoming_only") return GainVariant::incoming_only;
  if (text == "symmetric") return GainVariant::symmetric;
  return std::nullopt;
}

std::string_view to_string(MoveKind kind) {
  return kind == MoveKind::balance ? "balance" : "communication";
}

CommCost comm_cost(NodeIndex node, DeviceIndex candidate, const Assignment& assignment,
                   const CostedGraph& costed, GainVariant variant) {
  const auto& g = costed.graph();
  CommCost c;
  auto tally = [&](NodeIndex partner, const IndexedEdge& e) {
    if (e.kind != EdgeKind::data) return;
    (assignment.device_of(partner) == candidate ? c.internal : c.external) += e.bytes;
  };
  for (EdgeIndex i : g.in_edges(node)) tally(g.edges()[i].src, g.edges()[i]);
  if (variant == GainVariant::symmetric)
    for (EdgeIndex i : g.out_edges(node)) tally(g.edges()[i].dst, g.edges()[i]);
  c.gain = c.external - c.internal;
  return c;
}

CommCost comm_cost(const NodeId& node, std::string_view candidate, const Assignment& assignment,
                   const CostedGraph& costed, GainVariant variant) {
  return comm_cost(costed.graph().index_of(node), costed.fleet().index_of(candidate), assignment,
                   costed, variant);
}

GainTable::GainTable(const CostedGraph& costed, const Assignment& assignment,
                     std::span<const NodeIndex> nodes, GainVariant variant)
    : nodes_(nodes.begin(), nodes.end()), devices_(costed.device_count()) {
  entries_.reserve(nodes_.size() * devices_);
  for (NodeIndex v : nodes_)
    for (DeviceIndex d = 0; d < devices_; ++d)
      entries_.push_back(comm_cost(v, d, assignment, costed, variant));
}

bool balance_ok(const Assignment& assignment, double epsilon) {
  const double share = assignment.ideal_share();
  for (double load : assignment.loads())
    if (std::abs(load - share) > epsilon) return false;
  return true;
}

std::optional<MoveRecord> try_communication_move(NodeIndex node, Assignment& assignment,
                                                 const CostedGraph& costed,
                                                 const RefinerConfig& config, int pass_index) {
  const DeviceIndex from = assignment.device_of(node);
  const auto k = static_cast<DeviceIndex>(costed.device_count());

  DeviceIndex best = 0;
  std::int64_t best_gain = 0;
  std::int64_t current_gain = 0;
  for (DeviceIndex d = 0; d < k; ++d) {
    const std::int64_t gain = comm_cost(node, d, assignment, costed, config.gain_variant).gain;
    if (d == 0 || gain < best_gain) {
      best = d;
      best_gain = gain;
    }
    if (d == from) current_gain = gain;
  }
  if (best == from || !(best_gain < current_gain)) return std::nullopt;

  const double share = assignment.ideal_share();
  const bool receiver_ok =
      (assignment.load(best) + costed.cost(node, best)) - share <= config.epsilon;
  const bool donor_ok =
      share - (assignment.load(from) - costed.cost(node, from)) <= config.epsilon;
  if (!receiver_ok || !donor_ok) return std::nullopt;

  assignment.move(node, best, costed);
  return MoveRecord{node, from, best, MoveKind::communication, current_gain, best_gain,
                    pass_index};
}

std::optional<MoveRecord> try_balance_move(NodeIndex node, Assignment& assignment,
                                           const CostedGraph& costed,
                                           const RefinerConfig& config, int pass_index) {
  const DeviceIndex from = assignment.device_of(node);
  const double share = assignment.ideal_share();
  if (!(assignment.load(from) - costed.cost(node, from) > share)) return std::nullopt;

  std::optional<DeviceIndex> best;
  double best_distance = 0.0;
  for (DeviceIndex d = 0; d < costed.device_count(); ++d) {
    if (d == from) continue;
    const double landed = assignment.load(d) + costed.cost(node, d);
    if (!(landed < share)) continue;
    const double distance = std::abs(landed - share);
    if (!best || distance < best_distance) {
      best = d;
      best_distance = distance;
    }
  }
  if (!best) return std::nullopt;

  const auto gain_before = comm_cost(node, from, assignment, costed, config.gain_variant).gain;
  const auto gain_after = comm_cost(node, *best, assignment, costed, config.gain_variant).gain;
  assignment.move(node, *best, costed);
  return MoveRecord{node, from, *best, MoveKind::balance, gain_before, gain_after, pass_index};
}

RefineResult refine(Assignment assignment, const CostedGraph& costed,
                    std::span<const NodeIndex> relocatable, const RefinerConfig& config) {
  if (config.max_passes < 1) throw Error(Errc::invalid_config, "max_passes must be >= 1");
  if (!(config.epsilon >= 0.0)) throw Error(Errc::invalid_config, "epsilon must be >= 0");

  RefineResult result{std::move(assignment), {}, 0, false};
  std::vector<int> moved_in_pass(costed.node_count(), -1);

  for (int pass = 0; pass < config.max_passes; ++pass) {
    const std::size_t before = result.moves.size();
    auto record = [&](std::optional<MoveRecord> move) {
      if (!move) return;
      moved_in_pass[move->node] = pass;
      result.moves.push_back(*move);
    };

    for (NodeIndex v : relocatable)
      if (moved_in_pass[v] != pass)
        record(try_communication_move(v, result.assignment, costed, config, pass));
    if (config.enable_balance_moves)
      for (NodeIndex v : relocatable)
        if (moved_in_pass[v] != pass)
          record(try_balance_move(v, result.assignment, costed, config, pass));

    result.passes = pass + 1;
    if (result.moves.size() == before) {
      result.converged = true;
      break;
    }
  }
  return result;
}

double default_epsilon(const Assignment& assignment) { return 0.05 * assignment.ideal_share(); }

}  // namespace dfpart
