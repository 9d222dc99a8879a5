#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ridesim/instance.hpp"
#include "ridesim/report.hpp"
#include "ridesim/rng.hpp"
#include "ridesim/sim.hpp"

namespace {

using namespace ridesim;

struct NetworkArgs {
  std::string nodes_path;
  std::string edges_path;
  int grid = 0;
  std::string grid_weights = "unit";
  double grid_min = 200.0;
  double grid_max = 800.0;
  std::uint64_t grid_seed = 1;
  std::size_t cache_capacity = NetConfig{}.cache_capacity;
};

void add_network_options(CLI::App* cmd, NetworkArgs& args) {
  cmd->add_option("--network-nodes", args.nodes_path, "node file: id lat lon per line");
  cmd->add_option("--network-edges", args.edges_path, "edge file: u v w per line, w in meters");
  cmd->add_option("--grid", args.grid, "use a built-in n x n lattice network");
  cmd->add_option("--grid-weights", args.grid_weights, "unit | random")
      ->check(CLI::IsMember({"unit", "random"}));
  cmd->add_option("--grid-min", args.grid_min, "minimum random edge weight (meters)");
  cmd->add_option("--grid-max", args.grid_max, "maximum random edge weight (meters)");
  cmd->add_option("--grid-seed", args.grid_seed, "seed for random grid weights");
  cmd->add_option("--cache-capacity", args.cache_capacity, "shortest-path cache entries");
}

RoadNetwork open_network(const NetworkArgs& args) {
  NetConfig net_cfg;
  net_cfg.cache_capacity = args.cache_capacity;
  if (args.grid > 0) {
    GridParams gp;
    gp.n = args.grid;
    gp.weights = args.grid_weights == "unit" ? GridWeights::Unit : GridWeights::Uniform;
    gp.weight_min = args.grid_min;
    gp.weight_max = args.grid_max;
    gp.seed = args.grid_seed;
    return make_grid_network(gp, net_cfg);
  }
  if (args.nodes_path.empty() || args.edges_path.empty()) {
    throw CLI::ValidationError("network", "pass --grid N or both --network-nodes/--network-edges");
  }
  return load_network_files(args.nodes_path, args.edges_path, net_cfg);
}

void write_report_pair(const std::string& base, const SimReport& report,
                       const ReportOptions& opts) {
  write_text_file(base + ".json", report_to_json(report, opts));
  write_text_file(base + ".csv", report_to_csv(report));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ridesim: peer-to-peer ridesharing matching simulator"};
  app.require_subcommand(1);

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "generate a problem instance");
  NetworkArgs gen_net;
  add_network_options(gen, gen_net);
  GenParams gen_params;
  std::string gen_profile = "uniform";
  std::string gen_out = "instance.txt";
  std::string gen_out_nodes, gen_out_edges;
  double rate_multiplier = 1.0;
  gen->add_option("--drivers", gen_params.driver_count, "number of drivers");
  gen->add_option("--riders", gen_params.rider_count, "number of riders");
  gen->add_option("--horizon", gen_params.horizon_seconds, "arrival horizon (seconds)");
  gen->add_option("--batch-seconds", gen_params.batch_seconds, "batch window for batched profile");
  gen->add_option("--capacity", gen_params.capacity, "seats per driver");
  gen->add_option("--driver-slack", gen_params.driver_slack, "driver deadline slack factor");
  gen->add_option("--rider-slack", gen_params.rider_slack, "rider window slack factor");
  gen->add_option("--speed", gen_params.speed, "fleet speed (m/s)");
  gen->add_option("--profile", gen_profile, "uniform | batched")
      ->check(CLI::IsMember({"uniform", "batched"}));
  gen->add_option("--rate-multiplier", rate_multiplier, "scales the rider count");
  gen->add_option("--seed", gen_params.seed, "generator seed");
  gen->add_option("--out", gen_out, "instance output path");
  gen->add_option("--out-nodes", gen_out_nodes, "also write the network node file");
  gen->add_option("--out-edges", gen_out_edges, "also write the network edge file");

  // ---- shared run options ----
  struct RunArgs {
    CLI::App* cmd = nullptr;
    NetworkArgs net;
    std::string instance_path;
    std::string matcher = "greedy";
    std::string config_path;
    std::string out = "report";
    std::string events_path;
    std::uint64_t seed = 0;
    Seconds batch_seconds = 30;
    Seconds horizon = -1;
    double speed = 10.0;
    double alpha = 0.5;
    bool emit_timing = false;
  };

  auto add_run_options = [](CLI::App* cmd, RunArgs& args, bool with_matcher) {
    args.cmd = cmd;
    add_network_options(cmd, args.net);
    cmd->add_option("--instance", args.instance_path, "instance file")->required();
    if (with_matcher) {
      cmd->add_option("--matcher", args.matcher, "greedy | nn | sa | bbo")
          ->check(CLI::IsMember({"greedy", "nn", "sa", "bbo"}));
    }
    cmd->add_option("--config", args.config_path, "key = value configuration file");
    cmd->add_option("--seed", args.seed, "master seed");
    cmd->add_option("--batch-seconds", args.batch_seconds, "batch length (seconds)");
    cmd->add_option("--horizon", args.horizon,
                    "simulation horizon (default: last arrival rounded up to a batch)");
    cmd->add_option("--speed", args.speed, "fleet speed (m/s)");
    cmd->add_option("--alpha", args.alpha, "objective weight");
    cmd->add_option("--out", args.out, "output base path (.json/.csv appended)");
    cmd->add_option("--events", args.events_path, "write the event log to this path");
    cmd->add_flag("--emit-timing", args.emit_timing, "include wall-clock timings in JSON");
  };

  auto* run_cmd = app.add_subcommand("run", "simulate one matcher on an instance");
  RunArgs run_args;
  add_run_options(run_cmd, run_args, true);

  auto* cmp_cmd = app.add_subcommand("compare", "run every matcher on the same instance and seed");
  RunArgs cmp_args;
  add_run_options(cmp_cmd, cmp_args, false);

  auto* sweep_cmd = app.add_subcommand("sweep", "run the four standard parameter cases");
  RunArgs sweep_args;
  add_run_options(sweep_cmd, sweep_args, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      RoadNetwork net = open_network(gen_net);
      gen_params.profile =
          gen_profile == "batched" ? ArrivalProfile::Batched : ArrivalProfile::Uniform;
      gen_params.rider_count = static_cast<int>(
          std::llround(static_cast<double>(gen_params.rider_count) * rate_multiplier));
      auto records = generate(net, gen_params);
      save_instance_file(gen_out, records);
      if (!gen_out_nodes.empty() || !gen_out_edges.empty()) {
        if (gen_net.grid <= 0) {
          throw std::runtime_error("--out-nodes/--out-edges require --grid");
        }
        GridParams gp;
        gp.n = gen_net.grid;
        gp.weights = gen_net.grid_weights == "unit" ? GridWeights::Unit : GridWeights::Uniform;
        gp.weight_min = gen_net.grid_min;
        gp.weight_max = gen_net.grid_max;
        gp.seed = gen_net.grid_seed;
        auto [nodes, edges] = grid_records(gp);
        std::ostringstream ns, es;
        ns.precision(17);  // weights must survive a write/read round trip
        es.precision(17);
        ns << "# id lat lon\n";
        for (const auto& n : nodes) ns << n.id << ' ' << n.lat << ' ' << n.lon << '\n';
        es << "# u v w\n";
        for (const auto& e : edges) es << e.u << ' ' << e.v << ' ' << e.w << '\n';
        if (!gen_out_nodes.empty()) write_text_file(gen_out_nodes, ns.str());
        if (!gen_out_edges.empty()) write_text_file(gen_out_edges, es.str());
      }
      std::cout << "wrote " << records.size() << " records to " << gen_out << "\n";
      return 0;
    }

    // Configuration file first, then explicitly passed flags override it.
    auto make_config = [](const RunArgs& args, const std::vector<InstanceRecord>& records) {
      FileConfig file_cfg;
      if (!args.config_path.empty()) {
        file_cfg = apply_config(parse_config_file(args.config_path), file_cfg);
      }
      SimConfig cfg = file_cfg.sim;
      if (args.cmd->count("--seed")) cfg.seed = args.seed;
      if (args.cmd->count("--batch-seconds")) cfg.batch_seconds = args.batch_seconds;
      if (args.cmd->count("--alpha")) cfg.cost_params.alpha = args.alpha;
      cfg.matcher.bbo.alpha = cfg.cost_params.alpha;
      cfg.fleet_speed = args.speed;
      Seconds horizon = args.horizon;
      if (horizon < 0) {
        Seconds last = 0;
        for (const auto& r : records) last = std::max(last, r.early);
        horizon = ((last / cfg.batch_seconds) + 1) * cfg.batch_seconds;
      }
      cfg.horizon_seconds = horizon;
      std::size_t cache = args.cmd->count("--cache-capacity") ? args.net.cache_capacity
                                                              : file_cfg.cache_capacity;
      return std::pair<SimConfig, std::size_t>{cfg, cache};
    };

    if (run_cmd->parsed()) {
      auto records = load_instance_file(run_args.instance_path);
      auto [cfg, cache] = make_config(run_args, records);
      run_args.net.cache_capacity = cache;
      RoadNetwork net = open_network(run_args.net);
      cfg.matcher.name = run_args.matcher;
      SimReport report = run(records, cfg, net);
      ReportOptions opts{run_args.emit_timing};
      write_report_pair(run_args.out, report, opts);
      if (!run_args.events_path.empty()) {
        write_text_file(run_args.events_path, events_to_text(report.events));
      }
      std::cout << report_to_json(report, opts);
      return 0;
    }

    if (cmp_cmd->parsed()) {
      auto records = load_instance_file(cmp_args.instance_path);
      auto [cfg, cache] = make_config(cmp_args, records);
      cmp_args.net.cache_capacity = cache;
      RoadNetwork net = open_network(cmp_args.net);
      std::vector<SimReport> reports;
      for (const char* name : {"greedy", "nn", "sa", "bbo"}) {
        SimConfig c = cfg;
        c.matcher.name = name;
        reports.push_back(run(records, c, net));
      }
      std::int64_t drivers = 0;
      for (const auto& r : records) {
        if (r.is_driver()) ++drivers;
      }
      auto rows = comparison_rows(reports, drivers);
      ReportOptions opts{cmp_args.emit_timing};
      write_text_file(cmp_args.out + ".csv", comparison_to_csv(rows));
      write_text_file(cmp_args.out + ".json", comparison_to_json(rows, reports, opts));
      std::cout << comparison_to_csv(rows);
      return 0;
    }

    if (sweep_cmd->parsed()) {
      auto records = load_instance_file(sweep_args.instance_path);
      auto [cfg, cache] = make_config(sweep_args, records);
      sweep_args.net.cache_capacity = cache;
      RoadNetwork net = open_network(sweep_args.net);
      auto cases = default_sweep_cases();
      std::vector<SimReport> reports;
      for (const SweepCase& c : cases) {
        SimConfig sc = cfg;
        sc.matcher.name = "bbo";
        sc.matcher.bbo = c.bbo;
        sc.matcher.bbo.alpha = sc.cost_params.alpha;
        reports.push_back(run(records, sc, net));
      }
      ReportOptions opts{sweep_args.emit_timing};
      write_text_file(sweep_args.out + ".csv", sweep_to_csv(cases, reports));
      write_text_file(sweep_args.out + ".json", sweep_to_json(cases, reports, opts));
      std::cout << sweep_to_csv(cases, reports);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
