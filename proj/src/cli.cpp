#include "dfpart/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "dfpart/io.hpp"
#include "dfpart/report.hpp"

namespace dfpart::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

struct CommonOptions {
  std::string graph;
  std::string fleet;
  std::string out_dir = ".";
  std::string profile;
  std::string reference_device;
  double expensive_fraction = 0.9;
  bool dot = false;
};

struct PartitionOptions {
  std::string strategy = "block";
  std::uint64_t seed = 0;
};

struct RefineOptions {
  std::string assignment;
  std::optional<double> epsilon;
  int max_passes = 20;
  std::string gain_variant = "incoming_only";
  bool no_balance_moves = false;
};

struct SimulateOptions {
  std::string assignment;
  std::string tags;
  bool no_auto_tag = false;
  SimConfig config;
  std::uint64_t seed = 0;
};

struct Inputs {
  CostedGraph costed;
  std::vector<NodeIndex> relocatable;
};

Inputs load_inputs(const CommonOptions& o) {
  GraphData data = io::parse_graph(io::read_json_file(o.graph));
  if (!o.profile.empty()) io::apply_profile(data, io::parse_profile(io::read_json_file(o.profile)));
  DataflowGraph graph = validate_graph(std::move(data));
  DeviceFleet fleet = io::parse_fleet(io::read_json_file(o.fleet));
  Inputs in{cost_graph(std::move(graph), std::move(fleet)), {}};
  const std::string reference =
      o.reference_device.empty() ? in.costed.fleet()[0].id : o.reference_device;
  in.relocatable = select_relocatable(in.costed, reference, o.expensive_fraction);
  return in;
}

fs::path prepare_out_dir(const CommonOptions& o) {
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + o.out_dir + "': " + ec.message());
  return fs::path(o.out_dir);
}

void write_json(const fs::path& path, const json& doc) { io::write_text_file(path, doc.dump(2) + "\n"); }

Assignment load_assignment(const std::string& path, const CostedGraph& costed) {
  return Assignment(costed, io::parse_assignment(io::read_json_file(path), costed));
}

Assignment run_partition(const Inputs& in, const PartitionOptions& p) {
  if (p.strategy == "block") return block_partition(in.costed);
  if (p.strategy == "random") return random_partition(in.costed, p.seed);
  throw Error(Errc::invalid_config, "unknown strategy '" + p.strategy + "'");
}

RefinerConfig refiner_config(const RefineOptions& r, const Assignment& initial) {
  RefinerConfig config;
  config.epsilon = r.epsilon.value_or(default_epsilon(initial));
  config.max_passes = r.max_passes;
  config.enable_balance_moves = !r.no_balance_moves;
  auto variant = parse_gain_variant(r.gain_variant);
  if (!variant) throw Error(Errc::invalid_config, "unknown gain variant '" + r.gain_variant + "'");
  config.gain_variant = *variant;
  return config;
}

SimResult run_simulation(const Inputs& in, const Assignment& start, const SimulateOptions& s) {
  std::vector<std::optional<BottleneckTag>> tags(in.costed.node_count());
  if (!s.tags.empty()) {
    tags = io::parse_tags(io::read_json_file(s.tags), in.costed);
  } else if (!s.no_auto_tag) {
    auto computed = tag_nodes(in.costed);
    tags.assign(computed.begin(), computed.end());
  }
  return simulate(in.costed, tags, start, in.relocatable, s.config, s.seed);
}

void maybe_write_dot(const CommonOptions& o, const fs::path& dir, const Inputs& in,
                     const Assignment& a) {
  if (o.dot) io::write_text_file(dir / "partition.dot", io::to_dot(in.costed, a));
}

void add_common(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--graph", o.graph, "Dataflow graph JSON")->required();
  cmd.add_option("--fleet", o.fleet, "Device fleet JSON")->required();
  cmd.add_option("--out-dir", o.out_dir, "Directory for output artifacts");
  cmd.add_option("--profile", o.profile, "Measured cost profile JSON");
  cmd.add_option("--reference-device", o.reference_device,
                 "Device used to rank node costs (default: first device)");
  cmd.add_option("--expensive-fraction", o.expensive_fraction,
                 "Cumulative cost fraction that marks nodes as expensive");
  cmd.add_flag("--dot", o.dot, "Also write partition.dot");
}

void add_partition(CLI::App& cmd, PartitionOptions& p) {
  cmd.add_option("--strategy", p.strategy, "Initial partitioning strategy")
      ->check(CLI::IsMember({"block", "random"}));
  cmd.add_option("--seed", p.seed, "Seed for the random strategy");
}

void add_refine(CLI::App& cmd, RefineOptions& r) {
  cmd.add_option("--epsilon", r.epsilon, "Balance slack in time units (default 0.05 * C/k)");
  cmd.add_option("--max-passes", r.max_passes, "Refinement pass limit");
  cmd.add_option("--gain-variant", r.gain_variant, "incoming_only or symmetric")
      ->check(CLI::IsMember({"incoming_only", "symmetric"}));
  cmd.add_flag("--no-balance-moves", r.no_balance_moves, "Disable pure load-balance moves");
}

void add_simulate(CLI::App& cmd, SimulateOptions& s) {
  cmd.add_option("--tags", s.tags, "Bottleneck tags JSON (overrides auto-tagging)");
  cmd.add_flag("--no-auto-tag", s.no_auto_tag, "Do not derive tags from the cost model");
  cmd.add_option("--theta", s.config.theta, "Overload utilization threshold");
  cmd.add_option("--gamma", s.config.gamma, "Underload utilization threshold");
  cmd.add_option("--window", s.config.window, "Utilization window, time units");
  cmd.add_option("--cooldown", s.config.cooldown, "Windows an acquired node stays put");
  cmd.add_option("--horizon", s.config.horizon, "Simulated time, time units");
  cmd.add_option("--steps-per-window", s.config.steps_per_window,
                 "Training steps offered per window");
  cmd.add_option("--interference", s.config.interference,
                 "Utilization noise amplitude in [0, 1]");
  cmd.add_option("--sim-seed", s.seed, "Simulation seed");
}

int cmd_partition(const CommonOptions& o, const PartitionOptions& p, std::ostream& out) {
  const Inputs in = load_inputs(o);
  const Assignment a = run_partition(in, p);
  const fs::path dir = prepare_out_dir(o);
  Report report = make_report(in.costed, a);
  report.makespan_initial = makespan(in.costed, a);
  write_json(dir / "assignment.json", io::assignment_to_json(in.costed, a));
  write_json(dir / "report.json", to_json(report));
  maybe_write_dot(o, dir, in, a);
  out << to_json(report).dump(2) << "\n";
  return kExitOk;
}

int cmd_refine(const CommonOptions& o, const RefineOptions& r, std::ostream& out) {
  const Inputs in = load_inputs(o);
  const Assignment initial = load_assignment(r.assignment, in.costed);
  const RefineResult refined = refine(initial, in.costed, in.relocatable, refiner_config(r, initial));
  const fs::path dir = prepare_out_dir(o);

  Report report = make_report(in.costed, refined.assignment);
  report.cut_size_initial = cut_size(in.costed, initial);
  report.makespan_initial = makespan(in.costed, initial);
  report.cut_size_refined = report.cut_size;
  report.makespan_refined = makespan(in.costed, refined.assignment);
  report.move_count = refined.moves.size();
  write_json(dir / "refined_assignment.json", io::assignment_to_json(in.costed, refined.assignment));
  io::write_text_file(dir / "moves.jsonl", io::move_log_jsonl(in.costed, refined.moves));
  write_json(dir / "report.json", to_json(report));
  maybe_write_dot(o, dir, in, refined.assignment);
  out << to_json(report).dump(2) << "\n";
  return kExitOk;
}

int cmd_simulate(const CommonOptions& o, const SimulateOptions& s, std::ostream& out) {
  const Inputs in = load_inputs(o);
  const Assignment start = load_assignment(s.assignment, in.costed);
  const SimResult sim = run_simulation(in, start, s);
  const fs::path dir = prepare_out_dir(o);

  Report report = make_report(in.costed, sim.assignment);
  report.cut_size_initial = cut_size(in.costed, start);
  report.makespan_initial = makespan(in.costed, start);
  report.makespan_simulated = makespan(in.costed, sim.assignment);
  report.migration_count = sim.migrations;
  write_json(dir / "final_assignment.json", io::assignment_to_json(in.costed, sim.assignment));
  io::write_text_file(dir / "trace.jsonl", io::trace_jsonl(in.costed, sim.trace));
  write_json(dir / "report.json", to_json(report));
  maybe_write_dot(o, dir, in, sim.assignment);
  out << to_json(report).dump(2) << "\n";
  return kExitOk;
}

int cmd_pipeline(const CommonOptions& o, const PartitionOptions& p, const RefineOptions& r,
                 const SimulateOptions& s, std::ostream& out) {
  const Inputs in = load_inputs(o);
  const Assignment initial = run_partition(in, p);
  const RefineResult refined = refine(initial, in.costed, in.relocatable, refiner_config(r, initial));
  const SimResult sim = run_simulation(in, refined.assignment, s);
  const fs::path dir = prepare_out_dir(o);

  Report report = make_report(in.costed, sim.assignment);
  report.cut_size_initial = cut_size(in.costed, initial);
  report.makespan_initial = makespan(in.costed, initial);
  report.cut_size_refined = cut_size(in.costed, refined.assignment);
  report.makespan_refined = makespan(in.costed, refined.assignment);
  report.makespan_simulated = makespan(in.costed, sim.assignment);
  report.move_count = refined.moves.size();
  report.migration_count = sim.migrations;

  write_json(dir / "assignment.json", io::assignment_to_json(in.costed, initial));
  write_json(dir / "refined_assignment.json", io::assignment_to_json(in.costed, refined.assignment));
  io::write_text_file(dir / "moves.jsonl", io::move_log_jsonl(in.costed, refined.moves));
  write_json(dir / "final_assignment.json", io::assignment_to_json(in.costed, sim.assignment));
  io::write_text_file(dir / "trace.jsonl", io::trace_jsonl(in.costed, sim.trace));
  write_json(dir / "report.json", to_json(report));
  maybe_write_dot(o, dir, in, sim.assignment);
  out << to_json(report).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Partition dataflow graphs across devices and simulate runtime rebalancing",
               "dfpart"};
  app.require_subcommand(1);

  CommonOptions common;
  PartitionOptions part;
  RefineOptions ref;
  SimulateOptions sim;

  auto* partition = app.add_subcommand("partition", "Initial block or random placement");
  add_common(*partition, common);
  add_partition(*partition, part);

  auto* refine_cmd = app.add_subcommand("refine", "Greedy communication/balance refinement");
  add_common(*refine_cmd, common);
  refine_cmd->add_option("--assignment", ref.assignment, "Assignment JSON")->required();
  add_refine(*refine_cmd, ref);

  auto* simulate_cmd = app.add_subcommand("simulate", "Scheduling-assistant simulation");
  add_common(*simulate_cmd, common);
  simulate_cmd->add_option("--assignment", sim.assignment, "Assignment JSON")->required();
  add_simulate(*simulate_cmd, sim);

  auto* pipeline = app.add_subcommand("pipeline", "partition -> refine -> simulate");
  add_common(*pipeline, common);
  add_partition(*pipeline, part);
  add_refine(*pipeline, ref);
  add_simulate(*pipeline, sim);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (partition->parsed()) return cmd_partition(common, part, out);
    if (refine_cmd->parsed()) return cmd_refine(common, ref, out);
    if (simulate_cmd->parsed()) return cmd_simulate(common, sim, out);
    return cmd_pipeline(common, part, ref, sim, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace dfpart::cli
