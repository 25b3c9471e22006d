#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dfpart/partition.hpp"

namespace dfpart {

/// Summary metrics a command emits next to its artifacts. Stages that did not
/// run leave their fields empty (serialized as null).
struct Report {
  std::vector<std::pair<std::string, double>> device_loads;
  std::int64_t cut_size = 0;
  std::optional<std::int64_t> cut_size_initial;
  std::optional<std::int64_t> cut_size_refined;
  double imbalance = 0.0;
  std::optional<double> makespan_initial;
  std::optional<double> makespan_refined;
  std::optional<double> makespan_simulated;
  std::optional<std::size_t> move_count;
  std::optional<std::size_t> migration_count;
};

/// max_i |C_i - C/k| / (C/k); 0 when C is 0.
double imbalance(const Assignment& assignment);

/// Loads, cut size and imbalance of `assignment`; stage fields left empty.
Report make_report(const CostedGraph& costed, const Assignment& assignment);

nlohmann::json to_json(const Report& report);

}  // namespace dfpart
