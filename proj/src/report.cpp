#include "siphsim/report.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <locale>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "siphsim/accelerator.hpp"
#include "siphsim/errors.hpp"

namespace siphsim {

const std::vector<std::string>& evaluation_topologies() {
  static const std::vector<std::string> names{"bus", "tree", "trine", "mesh", "monolithic"};
  return names;
}

std::string topology_name(const TopologyKind& kind) { return kind.name(); }

const ReportRow& SimReport::row(const std::string& topology, const std::string& model) const {
  for (const auto& r : rows)
    if (r.topology == topology && r.model == model) return r;
  throw InvalidParams("no report row for " + topology + "/" + model);
}

std::string format_number(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(9);
  os << v;
  return os.str();
}

namespace {

std::string fmt(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

std::vector<LayerSpec> resolve_model(const RunConfig& config, const std::string& name) {
  std::vector<LayerSpec> model;
  if (!config.workload.model_file.empty() &&
      std::filesystem::path(config.workload.model_file).stem().string() == name)
    model = load_model_file(config.workload.model_file);
  else
    model = builtin_model(name);
  if (config.workload.bit_width > 0)
    for (auto& l : model) l.bit_width = config.workload.bit_width;
  return model;
}

TopologyKind resolve_topology(const RunConfig& config, const ChipletPlatform& platform, const std::string& name) {
  if (name == "bus") return TopologyKind::bus();
  if (name == "tree") return TopologyKind::tree();
  if (name == "trine") {
    if (config.network.type == TopologyType::Trine) return config.network;
    return TopologyKind::trine(subnetwork_count_for_memory_bw(platform.total_memory_bandwidth(), config.device,
                                                              platform.compute_chiplets.size()));
  }
  if (name == "mesh") {
    if (config.network.type == TopologyType::ElectricalMesh) return config.network;
    return TopologyKind::mesh();
  }
  throw ConfigError("unknown topology '" + name + "' (bus, tree, trine, mesh, monolithic)");
}

double partition_rate_bytes(const RunConfig& config, const ChipletPlatform& platform, bool photonic) {
  if (platform.monolithic) return platform.total_memory_bandwidth();
  const DeviceParams& d = config.device;
  double line = photonic ? d.waveguide_rate_bps() : config.electrical.wire_rate_gbps * 1e9;
  return std::min({line, d.chiplet_bw_cap_bytes_per_s * 8.0, d.gateway_injection_bps()}) / 8.0;
}

std::string audit_text(const ReportRow& row, const ActivityLog& log, const EnergyBreakdown& e) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  auto kv = [&os](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
  kv("topology", row.topology);
  kv("model", row.model);
  kv("makespan_s", format_number(log.makespan_s));
  kv("injected_bytes", std::to_string(log.injected_bytes));
  kv("delivered_bytes", std::to_string(log.delivered_bytes));
  kv("transfer_done_events", std::to_string(log.transfer_done_events));
  kv("mesh_bit_hops", std::to_string(log.mesh_bit_hops));
  kv("switch_setups", std::to_string(log.switch_setups));
  kv("pcmc_enabled", log.pcmc_enabled ? "true" : "false");
  kv("epoch_s", format_number(log.epoch_s));
  kv("laser_mw", format_number(row.power.laser_mw));
  kv("trimming_mw", format_number(row.power.trimming_mw));
  kv("mzi_static_mw", format_number(row.power.mzi_static_mw));
  kv("gateway_mw", format_number(row.power.gateway_mw));
  kv("mac_mw", format_number(row.power.mac_mw));
  kv("laser_j", format_number(e.laser_j));
  kv("trimming_j", format_number(e.trimming_j));
  kv("mzi_static_j", format_number(e.mzi_static_j));
  kv("gateway_j", format_number(e.gateway_j));
  kv("mac_j", format_number(e.mac_j));
  kv("electrical_j", format_number(e.electrical_j));
  kv("pcmc_switch_j", format_number(e.pcmc_switch_j));
  kv("total_j", format_number(e.total_j));

  os << "\n[gateways] id kind busy_s intervals reactivations active_s\n";
  for (std::size_t g = 0; g < log.gateway_busy.size(); ++g) {
    double active = log.makespan_s;
    std::uint64_t react = 0;
    if (log.pcmc_enabled) {
      active = 0.0;
      for (const auto& iv : log.gateway_active[g]) active += iv.end_s - iv.start_s;
      react = log.gateway_reactivations[g];
    }
    os << g << ' ' << (log.gateway_is_compute[g] ? "compute" : "memory") << ' ' << format_number(log.gateway_busy_s[g])
       << ' ' << log.gateway_busy[g].size() << ' ' << react << ' ' << format_number(active) << '\n';
  }
  os << "\n[resources] label busy_s\n";
  for (const auto& r : log.resources) os << r.label << ' ' << format_number(r.busy_s) << '\n';
  os << "\n[mzi] id reconfigurations\n";
  for (std::size_t m = 0; m < log.mzi_reconfigurations.size(); ++m)
    os << m << ' ' << log.mzi_reconfigurations[m] << '\n';

  std::map<ChipletId, double> compute_busy;
  for (const auto& c : log.compute) compute_busy[c.chiplet] += c.end_s - c.start_s;
  os << "\n[compute] chiplet busy_s\n";
  for (const auto& [chiplet, busy] : compute_busy) os << chiplet << ' ' << format_number(busy) << '\n';
  return os.str();
}

void normalize(SimReport& report) {
  for (auto& r : report.rows) {
    const ReportRow* base = nullptr;
    for (const auto& b : report.rows)
      if (b.topology == report.baseline && b.model == r.model) base = &b;
    if (base == nullptr) continue;
    auto ratio = [](double a, double b) -> std::optional<double> {
      if (b > 0) return a / b;
      return std::nullopt;
    };
    r.norm_power = ratio(r.power.total_mw, base->power.total_mw);
    r.norm_makespan = ratio(r.makespan_s, base->makespan_s);
    r.norm_energy = ratio(r.power.energy_j, base->power.energy_j);
    if (r.power.epb_pj_per_bit && base->power.epb_pj_per_bit)
      r.norm_epb = ratio(*r.power.epb_pj_per_bit, *base->power.epb_pj_per_bit);
  }
}

void sort_rows(SimReport& report) {
  std::sort(report.rows.begin(), report.rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.topology, a.model) < std::tie(b.topology, b.model);
  });
}

}  // namespace

ReportRow run_cell(const RunConfig& config, const std::string& topology, const std::string& model_name) {
  config.validate();
  std::vector<LayerSpec> model = resolve_model(config, model_name);

  const bool mono = topology == "monolithic";
  ChipletPlatform platform = mono ? crosslight_baseline(config.platform) : config.platform;
  NetworkTopology topo;
  if (!mono) topo = build_topology(resolve_topology(config, platform, topology), platform, config.device);
  const bool photonic = !mono && topo.kind.photonic();

  ExecutionPlan plan = config.workload.mapping == MappingMode::PerLayer
                           ? plan_from_mapping(model, map_layers(model, platform))
                           : partition_layers(model, platform, partition_rate_bytes(config, platform, photonic));
  TrafficTrace trace = build_trace(plan, platform, config.workload.packet_bytes);

  PcmcPolicy policy = config.policy;
  if (!photonic) policy.enabled = false;
  SimResult sim = simulate(trace, topo, platform, config.device, policy, config.electrical);

  ReportRow row;
  row.topology = topology;
  row.model = model_name;
  if (!mono) {
    row.inventory = enumerate_devices(topo, platform, config.device, policy.enabled);
    row.power = static_power(topo, row.inventory, config.device);
    row.subnetworks = topo.kind.subnetworks;
    row.stage_count = topo.stage_count;
    if (photonic) row.worst_loss_db = worst_case_path(topo, config.device).loss_db;
  }
  row.power.mac_mw = mac_power_mw(platform, config.device);
  EnergyBreakdown energy = run_energy(sim.log, topo, row.power, config.device, policy, config.electrical);
  if (sim.makespan_s > 0) row.power.electrical_mw = energy.electrical_j / sim.makespan_s * 1e3;
  row.power.update_total();
  row.power.energy_j = energy.total_j;
  if (energy.delivered_bits > 0) row.power.epb_pj_per_bit = energy.epb_pj_per_bit();

  row.makespan_s = sim.makespan_s;
  row.delivered_bits = energy.delivered_bits;
  row.trace_bytes = trace.total_bytes();
  row.transfers = trace.transfers.size();
  for (auto r : sim.log.gateway_reactivations) row.reactivations += r;
  row.audit = audit_text(row, sim.log, energy);
  return row;
}

SimReport run(const RunConfig& config) {
  std::string model = config.workload.model_file.empty()
                          ? config.workload.model
                          : std::filesystem::path(config.workload.model_file).stem().string();
  return sweep(config, {topology_name(config.network)}, {model});
}

SimReport sweep(const RunConfig& config, const std::vector<std::string>& topologies,
                const std::vector<std::string>& models) {
  if (topologies.empty() || models.empty()) throw ConfigError("sweep needs at least one topology and one model");
  for (const auto& t : topologies)
    if (std::find(evaluation_topologies().begin(), evaluation_topologies().end(), t) == evaluation_topologies().end())
      throw ConfigError("unknown topology '" + t + "'");

  SimReport report;
  report.baseline = config.baseline;
  if (report.baseline.empty())
    report.baseline = std::find(topologies.begin(), topologies.end(), "bus") != topologies.end() ? "bus"
                                                                                                : topologies.front();
  if (std::find(topologies.begin(), topologies.end(), report.baseline) == topologies.end())
    throw ConfigError("baseline '" + report.baseline + "' is not in the run set", 0, "report.baseline");

  std::vector<std::pair<std::string, std::string>> cells;
  for (const auto& t : topologies)
    for (const auto& m : models) cells.emplace_back(t, m);

  std::vector<ReportRow> rows(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        rows[i] = run_cell(config, cells[i].first, cells[i].second);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t n_threads = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, cells.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  report.rows = std::move(rows);
  sort_rows(report);
  normalize(report);
  return report;
}

std::string power_csv(const SimReport& report) {
  std::ostringstream os;
  os << "topology,model,laser_mw,trimming_mw,mzi_static_mw,gateway_mw,mac_mw,electrical_mw,total_mw,norm_total_mw\n";
  for (const auto& r : report.rows) {
    const auto& p = r.power;
    os << r.topology << ',' << r.model << ',' << format_number(p.laser_mw) << ',' << format_number(p.trimming_mw)
       << ',' << format_number(p.mzi_static_mw) << ',' << format_number(p.gateway_mw) << ','
       << format_number(p.mac_mw) << ',' << format_number(p.electrical_mw) << ',' << format_number(p.total_mw) << ','
       << fmt(r.norm_power) << '\n';
  }
  return os.str();
}

std::string latency_csv(const SimReport& report) {
  std::ostringstream os;
  os << "topology,model,makespan_s,transfers,norm_makespan\n";
  for (const auto& r : report.rows)
    os << r.topology << ',' << r.model << ',' << format_number(r.makespan_s) << ',' << r.transfers << ','
       << fmt(r.norm_makespan) << '\n';
  return os.str();
}

std::string epb_csv(const SimReport& report) {
  std::ostringstream os;
  os << "topology,model,energy_j,delivered_bits,epb_pj_per_bit,norm_energy,norm_epb\n";
  for (const auto& r : report.rows)
    os << r.topology << ',' << r.model << ',' << format_number(r.power.energy_j) << ',' << r.delivered_bits << ','
       << fmt(r.power.epb_pj_per_bit) << ',' << fmt(r.norm_energy) << ',' << fmt(r.norm_epb) << '\n';
  return os.str();
}

std::string summary_text(const SimReport& report) {
  std::ostringstream os;
  os << "baseline = " << report.baseline << '\n' << "rows = " << report.rows.size() << '\n';
  for (const auto& r : report.rows) {
    os << "\n[" << r.topology << '/' << r.model << "]\n";
    auto kv = [&os](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
    kv("subnetworks", std::to_string(r.subnetworks));
    kv("stage_count", std::to_string(r.stage_count));
    kv("worst_loss_db", fmt(r.worst_loss_db));
    kv("mr_modulators", std::to_string(r.inventory.mr_modulators));
    kv("mr_filters", std::to_string(r.inventory.mr_filters));
    kv("mzi_switches", std::to_string(r.inventory.mzi_switches));
    kv("pcmc_couplers", std::to_string(r.inventory.pcmc_couplers));
    kv("laser_sources", std::to_string(r.inventory.laser_sources));
    kv("laser_mw", format_number(r.power.laser_mw));
    kv("trimming_mw", format_number(r.power.trimming_mw));
    kv("mzi_static_mw", format_number(r.power.mzi_static_mw));
    kv("gateway_mw", format_number(r.power.gateway_mw));
    kv("mac_mw", format_number(r.power.mac_mw));
    kv("electrical_mw", format_number(r.power.electrical_mw));
    kv("total_mw", format_number(r.power.total_mw));
    kv("makespan_s", format_number(r.makespan_s));
    kv("energy_j", format_number(r.power.energy_j));
    kv("delivered_bits", std::to_string(r.delivered_bits));
    kv("epb_pj_per_bit", fmt(r.power.epb_pj_per_bit));
    kv("reactivations", std::to_string(r.reactivations));
    kv("norm_total_mw", fmt(r.norm_power));
    kv("norm_makespan", fmt(r.norm_makespan));
    kv("norm_energy", fmt(r.norm_energy));
    kv("norm_epb", fmt(r.norm_epb));
  }
  return os.str();
}

void write_report(const SimReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::path root(dir);
  fs::create_directories(root / "audit");
  auto write = [](const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + p.string() + "'");
    out << text;
  };
  write(root / "report_power.csv", power_csv(report));
  write(root / "report_latency.csv", latency_csv(report));
  write(root / "report_epb.csv", epb_csv(report));
  write(root / "summary.txt", summary_text(report));
  for (const auto& r : report.rows) write(root / "audit" / (r.topology + "_" + r.model + ".txt"), r.audit);
}

}  // namespace siphsim
