#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "dfpart/cost_model.hpp"
#include "dfpart/partition.hpp"
#include "dfpart/refine.hpp"
#include "dfpart/sched_sim.hpp"

namespace dfpart::io {

using nlohmann::json;

/// Reads and parses a JSON file. Unreadable files raise IoError; malformed
/// JSON raises Error(schema) with the byte offset in the message.
json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// {"nodes":[...], "edges":[...]}; unknown fields are rejected and all counts
/// must be JSON integers. Structural checks are left to validate_graph.
GraphData parse_graph(const json& doc);

/// {"devices":[{"id","compute_throughput","mem_bandwidth","net_bandwidth"}]}
DeviceFleet parse_fleet(const json& doc);

/// {"measured_costs_us": {node id: number}}
std::map<std::string, double> parse_profile(const json& doc);
/// Overrides measured_cost_us on matching nodes; unknown ids are an error.
void apply_profile(GraphData& graph, const std::map<std::string, double>& profile);

/// {node id: device id} covering every node exactly once.
std::vector<DeviceIndex> parse_assignment(const json& doc, const CostedGraph& costed);
json assignment_to_json(const CostedGraph& costed, const Assignment& assignment);

/// {node id: "compute_bound"|"memory_bound"|"network_bound"}; nodes may be
/// omitted.
std::vector<std::optional<BottleneckTag>> parse_tags(const json& doc, const CostedGraph& costed);

json graph_to_json(const GraphData& graph);
json fleet_to_json(const DeviceFleet& fleet);
/// Field order follows the documented line formats.
nlohmann::ordered_json to_json(const CostedGraph& costed, const MoveRecord& move);
nlohmann::ordered_json to_json(const CostedGraph& costed, const SimEvent& event);

/// One compact JSON object per line, newline-terminated.
std::string move_log_jsonl(const CostedGraph& costed, std::span<const MoveRecord> moves);
std::string trace_jsonl(const CostedGraph& costed, const SimTrace& trace);

/// Graphviz rendering: edge labels are bytes, node fill color is the device.
std::string to_dot(const CostedGraph& costed, const Assignment& assignment);

}  // namespace dfpart::io
