#include <CLI11.hpp>

#include <iostream>

#include "siphsim/accelerator.hpp"
#include "siphsim/errors.hpp"
#include "siphsim/report.hpp"

using namespace siphsim;

namespace {

struct Common {
  std::string config;
  std::string model_file;
  std::string baseline;
  std::string out;
  long long seed = 0;  // accepted for interface stability; the engine is deterministic
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "config file");
  cmd->add_option("--model-file", c.model_file, "model description file");
  cmd->add_option("--baseline", c.baseline, "normalization baseline topology");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "ignored; results do not depend on it");
}

RunConfig load(const Common& c) {
  RunConfig cfg = c.config.empty() ? default_config() : load_config(c.config);
  if (!c.model_file.empty()) cfg.workload.model_file = c.model_file;
  if (!c.baseline.empty()) cfg.baseline = c.baseline;
  if (!c.out.empty()) cfg.out_dir = c.out;
  return cfg;
}

void print_rows(const SimReport& report) {
  for (const auto& r : report.rows)
    std::cout << r.topology << ' ' << r.model << " makespan_s=" << format_number(r.makespan_s)
              << " total_mw=" << format_number(r.power.total_mw) << " energy_j=" << format_number(r.power.energy_j)
              << '\n';
}

void inspect(const RunConfig& cfg, const std::string& name) {
  std::vector<std::string> names;
  if (name == "all") names = {"bus", "tree", "trine", "mesh"};
  else names = {name};
  for (const auto& n : names) {
    RunConfig local = cfg;
    TopologyKind kind;
    if (n == "bus") kind = TopologyKind::bus();
    else if (n == "tree") kind = TopologyKind::tree();
    else if (n == "trine")
      kind = cfg.network.type == TopologyType::Trine
                 ? cfg.network
                 : TopologyKind::trine(subnetwork_count_for_memory_bw(cfg.platform.total_memory_bandwidth(),
                                                                       cfg.device, cfg.platform.compute_chiplets.size()));
    else if (n == "mesh")
      kind = cfg.network.type == TopologyType::ElectricalMesh ? cfg.network : TopologyKind::mesh();
    else throw ConfigError("unknown topology '" + n + "'");
    NetworkTopology t = build_topology(kind, cfg.platform, cfg.device);
    DeviceInventory inv = enumerate_devices(t, cfg.platform, cfg.device, cfg.policy.enabled);
    std::cout << "topology = " << n << '\n'
              << "compute_gateways = " << t.compute_gateway_count() << '\n'
              << "subnetworks = " << kind.subnetworks << '\n'
              << "stage_count = " << t.stage_count << '\n'
              << "mzi_switches = " << inv.mzi_switches << '\n'
              << "mr_modulators = " << inv.mr_modulators << '\n'
              << "mr_filters = " << inv.mr_filters << '\n'
              << "pcmc_couplers = " << inv.pcmc_couplers << '\n'
              << "laser_sources = " << inv.laser_sources << '\n';
    if (kind.photonic()) {
      WorstPath w = worst_case_path(t, cfg.device);
      std::cout << "worst_case_loss_db = " << format_number(w.loss_db) << '\n'
                << "worst_case_path = " << w.src << "->" << w.dst << '\n';
    } else {
      std::cout << "mesh = " << t.mesh_rows << 'x' << t.mesh_cols << '\n';
    }
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chiplet interposer network simulator"};
  app.require_subcommand(1);

  Common run_opts;
  std::string run_model, run_topology;
  auto* run_cmd = app.add_subcommand("run", "simulate one topology and model");
  add_common(run_cmd, run_opts);
  run_cmd->add_option("--model", run_model, "builtin model name");
  run_cmd->add_option("--topology", run_topology, "bus, tree, trine, mesh or monolithic");

  Common sweep_opts;
  std::vector<std::string> sweep_models, sweep_topologies;
  auto* sweep_cmd = app.add_subcommand("sweep", "cross product of topologies and models");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--model", sweep_models, "builtin model names (default: all)")->delimiter(',');
  sweep_cmd->add_option("--topology", sweep_topologies, "topologies (default: bus,tree,trine,mesh)")->delimiter(',');

  std::string inspect_config, inspect_topology = "all";
  auto* inspect_cmd = app.add_subcommand("inspect-topology", "stage counts, inventories and worst-case losses");
  inspect_cmd->add_option("--config", inspect_config, "config file");
  inspect_cmd->add_option("--topology", inspect_topology, "bus, tree, trine, mesh or all");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      RunConfig cfg = load(run_opts);
      if (!run_model.empty()) {
        cfg.workload.model = run_model;
        cfg.workload.model_file.clear();
      }
      SimReport report;
      if (run_topology.empty()) {
        report = run(cfg);
      } else {
        std::string model = cfg.workload.model_file.empty()
                                ? cfg.workload.model
                                : std::filesystem::path(cfg.workload.model_file).stem().string();
        if (!cfg.baseline.empty() && cfg.baseline != run_topology)
          report = sweep(cfg, {run_topology, cfg.baseline}, {model});
        else
          report = sweep(cfg, {run_topology}, {model});
      }
      write_report(report, cfg.out_dir);
      print_rows(report);
    } else if (*sweep_cmd) {
      RunConfig cfg = load(sweep_opts);
      if (sweep_topologies.empty()) sweep_topologies = {"bus", "tree", "trine", "mesh"};
      if (sweep_models.empty()) {
        if (!cfg.workload.model_file.empty())
          sweep_models = {std::filesystem::path(cfg.workload.model_file).stem().string()};
        else
          sweep_models = builtin_model_names();
      }
      SimReport report = sweep(cfg, sweep_topologies, sweep_models);
      write_report(report, cfg.out_dir);
      print_rows(report);
    } else if (*inspect_cmd) {
      RunConfig cfg = inspect_config.empty() ? default_config() : load_config(inspect_config);
      inspect(cfg, inspect_topology);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
