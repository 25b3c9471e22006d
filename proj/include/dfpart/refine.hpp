#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dfpart/partition.hpp"

namespace dfpart {

/// Which edges feed the internal/external byte sums.
enum class GainVariant {
  incoming_only,  // incoming data edges only
  symmetric,      // incoming and outgoing data edges
};

std::string_view to_string(GainVariant variant);
std::optional<GainVariant> parse_gain_variant(std::string_view text);

struct RefinerConfig {
  double epsilon = 0.0;  // allowed |C_D - C/k|, time units
  int max_passes = 20;
  bool enable_balance_moves = true;
  GainVariant gain_variant = GainVariant::incoming_only;
};

/// Bytes a node would exchange if it sat on a given device, all other nodes
/// fixed: `internal` from co-located partners, `external` from the rest, and
/// gain = external - internal.
struct CommCost {
  std::int64_t internal = 0;
  std::int64_t external = 0;
  std::int64_t gain = 0;

  friend bool operator==(const CommCost&, const CommCost&) = default;
};

CommCost comm_cost(NodeIndex node, DeviceIndex candidate, const Assignment& assignment,
                   const CostedGraph& costed, GainVariant variant = GainVariant::incoming_only);
/// Id-based lookup; throws Error(unknown_node) / Error(unknown_device).
CommCost comm_cost(const NodeId& node, std::string_view candidate, const Assignment& assignment,
                   const CostedGraph& costed, GainVariant variant = GainVariant::incoming_only);

/// Comm costs for every (relocatable node, device) pair.
class GainTable {
 public:
  GainTable(const CostedGraph& costed, const Assignment& assignment,
            std::span<const NodeIndex> nodes, GainVariant variant);

  std::span<const NodeIndex> nodes() const noexcept { return nodes_; }
  /// `row` indexes nodes(), not the graph.
  const CommCost& at(std::size_t row, DeviceIndex device) const {
    return entries_[row * devices_ + device];
  }

 private:
  std::vector<NodeIndex> nodes_;
  std::size_t devices_;
  std::vector<CommCost> entries_;
};

/// True iff every device load lies within epsilon of C/k (inclusive).
bool balance_ok(const Assignment& assignment, double epsilon);

enum class MoveKind { communication, balance };

std::string_view to_string(MoveKind kind);

struct MoveRecord {
  NodeIndex node;
  DeviceIndex from;
  DeviceIndex to;
  MoveKind kind;
  std::int64_t gain_before;  // gain on `from`
  std::int64_t gain_after;   // gain on `to`
  int pass_index;

  friend bool operator==(const MoveRecord&, const MoveRecord&) = default;
};

/// Moves `node` to its minimum-gain device (ties: lowest index) when that
/// strictly lowers its gain and both the receiver and the donor stay within
/// epsilon of C/k. Leaves the assignment untouched otherwise.
std::optional<MoveRecord> try_communication_move(NodeIndex node, Assignment& assignment,
                                                 const CostedGraph& costed,
                                                 const RefinerConfig& config,
                                                 int pass_index = 0);

/// Moves `node` to a device that stays strictly below C/k while the donor stays
/// strictly above it; among such devices picks the one whose new load lands
/// closest to C/k (ties: lowest index).
std::optional<MoveRecord> try_balance_move(NodeIndex node, Assignment& assignment,
                                           const CostedGraph& costed,
                                           const RefinerConfig& config, int pass_index = 0);

struct RefineResult {
  Assignment assignment;
  std::vector<MoveRecord> moves;
  int passes = 0;
  /// False when max_passes cut the run short.
  bool converged = false;
};

/// Greedy single-node refinement over the relocatable nodes.
///
/// Each pass visits nodes in ascending id order, first trying communication
/// moves and then (if enabled) balance moves; a node moves at most once per
/// pass. Stops after a pass with no moves or after max_passes.
RefineResult refine(Assignment assignment, const CostedGraph& costed,
                    std::span<const NodeIndex> relocatable, const RefinerConfig& config);

/// 0.05 * C / k.
double default_epsilon(const Assignment& assignment);

}  // namespace dfpart
