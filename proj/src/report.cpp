#include "dfpart/report.hpp"

#include <algorithm>
#include <cmath>

namespace dfpart {

double imbalance(const Assignment& assignment) {
  const double share = assignment.ideal_share();
  if (share <= 0.0) return 0.0;
  double worst = 0.0;
  for (double load : assignment.loads()) worst = std::max(worst, std::abs(load - share));
  return worst / share;
}

Report make_report(const CostedGraph& costed, const Assignment& assignment) {
  Report r;
  for (DeviceIndex d = 0; d < costed.device_count(); ++d)
    r.device_loads.emplace_back(costed.fleet()[d].id, assignment.load(d));
  r.cut_size = cut_size(costed, assignment);
  r.imbalance = imbalance(assignment);
  return r;
}

nlohmann::json to_json(const Report& report) {
  using nlohmann::json;
  auto optional = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  json loads = json::object();
  for (const auto& [id, load] : report.device_loads) loads[id] = load;
  return {{"device_loads", std::move(loads)},
          {"cut_size", report.cut_size},
          {"cut_size_initial", optional(report.cut_size_initial)},
          {"cut_size_refined", optional(report.cut_size_refined)},
          {"imbalance", report.imbalance},
          {"makespan_initial", optional(report.makespan_initial)},
          {"makespan_refined", optional(report.makespan_refined)},
          {"makespan_simulated", optional(report.makespan_simulated)},
          {"move_count", optional(report.move_count)},
          {"migration_count", optional(report.migration_count)}};
}

}  // namespace dfpart
