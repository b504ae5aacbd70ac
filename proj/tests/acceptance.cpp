// Acceptance checks; one PASS/FAIL line per criterion. argv[1] is the CLI binary.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "siphsim/accelerator.hpp"
#include "siphsim/config.hpp"
#include "siphsim/power.hpp"
#include "siphsim/report.hpp"
#include "siphsim/sim.hpp"

using namespace siphsim;
namespace fs = std::filesystem;

namespace {

constexpr double kAdditivityRel = 1e-12;
constexpr double kLaserShiftRel = 1e-9;
constexpr double kR2Tol = 1e-12;
constexpr double kSlopeTol = 1e-9;
constexpr int kOracleTraces = 1000;
constexpr int kPcmcTraces = 100;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  int failures = 0;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (failures < 6) detail += (failures ? "; " : "") + what;
    ++failures;
    pass = false;
  }
};

std::mt19937_64 rng{20240601};
int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
double uniform_real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

ChipletPlatform homogeneous(int n) {
  std::vector<std::pair<int, int>> c(static_cast<std::size_t>(n), {16, 16});
  return make_platform(c, 2e9, {MemoryChiplet{0, 96e9, 1 << 24}});
}

std::string capture(const std::string& cmd) {
  std::string out;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) return out;
  std::array<char, 512> buf{};
  while (fgets(buf.data(), buf.size(), pipe.get()) != nullptr) out += buf.data();
  return out;
}

int field(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + " = ", 0) == 0) return std::stoi(line.substr(key.size() + 3));
  return -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// 1
Outcome stage_counts(const std::string& cli) {
  Outcome o;
  auto t0 = Clock::now();
  std::string trine, tree;
  if (!cli.empty()) {
    trine = capture("\"" + cli + "\" inspect-topology --topology trine");
    tree = capture("\"" + cli + "\" inspect-topology --topology tree");
  } else {
    o.require(false, "CLI path not given");
    return o;
  }
  double dt = seconds_since(t0);
  int gw = field(trine, "compute_gateways"), k = field(trine, "subnetworks");
  int s_trine = field(trine, "stage_count"), s_tree = field(tree, "stage_count");
  o.require(gw == 32, "compute_gateways = " + std::to_string(gw));
  o.require(k == 8, "subnetworks = " + std::to_string(k));
  o.require(s_trine == 2, "trine stage_count = " + std::to_string(s_trine));
  o.require(s_tree == 5, "tree stage_count = " + std::to_string(s_tree));
  o.require(dt < 1.0, "runtime " + fmt(dt) + " s");
  if (o.pass) o.detail = "trine=2 tree=5 in " + fmt(dt) + " s";
  return o;
}

// 2
Outcome sizing() {
  Outcome o;
  DeviceParams p;
  p.wavelengths_per_waveguide = 8;
  p.modulation_rate_hz = 12e9;
  int k = subnetwork_count_for_memory_bw(96e9, p, 32);
  o.require(k == 8, "got " + std::to_string(k));
  if (o.pass) o.detail = "8 subnetworks";
  return o;
}

// 3
Outcome interposer_orderings() {
  Outcome o;
  auto t0 = Clock::now();
  RunConfig c = default_config();
  auto r = sweep(c, {"bus", "tree", "trine"}, builtin_model_names());
  double dt = seconds_since(t0);
  for (const auto& m : builtin_model_names()) {
    const auto &bus = r.row("bus", m), &tree = r.row("tree", m), &trine = r.row("trine", m);
    o.require(trine.makespan_s < tree.makespan_s, m + ": latency trine >= tree");
    o.require(trine.power.energy_j < tree.power.energy_j, m + ": energy trine >= tree");
    o.require(trine.power.energy_j < bus.power.energy_j, m + ": energy trine >= bus");
    o.require(trine.power.laser_mw > tree.power.laser_mw, m + ": laser trine <= tree");
    o.require(trine.power.trimming_mw > tree.power.trimming_mw, m + ": trimming trine <= tree");
  }
  o.require(dt < 120.0, "runtime " + fmt(dt) + " s");
  if (o.pass) o.detail = "6 models, sweep " + fmt(dt) + " s";
  return o;
}

// 4
Outcome chiplet_orderings() {
  Outcome o;
  RunConfig c = default_config();
  c.platform_name = "crosslight";
  c.platform = crosslight_platform();
  c.network = TopologyKind::trine(subnetwork_count_for_memory_bw(c.platform.total_memory_bandwidth(), c.device,
                                                                 c.platform.compute_chiplets.size()));
  c.policy.enabled = true;
  const std::vector<std::string> large{"resnet18", "vgg16", "densenet121", "mobilenetv2", "efficientnetb0"};
  std::vector<std::string> models = large;
  models.push_back("lenet5");
  auto r = sweep(c, {"trine", "mesh", "monolithic"}, models);

  double mean = 0.0;
  std::ostringstream ratios;
  for (const auto& m : large) {
    const auto &siph = r.row("trine", m), &mesh = r.row("mesh", m), &mono = r.row("monolithic", m);
    o.require(siph.makespan_s < mono.makespan_s, m + ": makespan 2.5D+SiPh " + fmt(siph.makespan_s) +
                                                     " >= monolithic " + fmt(mono.makespan_s));
    o.require(siph.makespan_s < mesh.makespan_s, m + ": makespan 2.5D+SiPh >= 2.5D+Mesh");
    o.require(mesh.power.total_mw < siph.power.total_mw, m + ": power 2.5D+Mesh >= 2.5D+SiPh");
    double ratio = mono.makespan_s / siph.makespan_s;
    mean += ratio / static_cast<double>(large.size());
    ratios << m << '=' << fmt(ratio) << ' ';
  }
  double lenet = r.row("monolithic", "lenet5").makespan_s / r.row("trine", "lenet5").makespan_s;
  o.require(lenet < mean, "lenet5 speedup " + fmt(lenet) + " >= large-model mean " + fmt(mean));
  o.detail += std::string(o.pass ? "" : " ") + "[speedups " + ratios.str() + "lenet5=" + fmt(lenet) + " mean=" + fmt(mean) + "]";
  return o;
}

TransferRequest random_single(const ChipletPlatform& platform, TrafficTrace& trace) {
  ChipletId mem = platform.memory_chiplets.front().id;
  ChipletId c = platform.compute_chiplets[uniform(0, static_cast<int>(platform.compute_chiplets.size()) - 1)].id;
  bool read = uniform(0, 1) == 1;
  trace.work.push_back({0, 0, c, mem, 0, 0, 0});
  TransferRequest t{0, read ? mem : c, read ? c : mem, static_cast<std::uint64_t>(uniform(1, 1 << 20)),
                    read ? TransferClass::WeightRead : TransferClass::OutputWrite, 0};
  trace.transfers.push_back(t);
  return t;
}

// 5
Outcome oracle() {
  Outcome o;
  for (int i = 0; i < kOracleTraces; ++i) {
    DeviceParams p;
    p.mzi_switch_time_s = uniform_real(0.0, 50e-9);
    p.group_delay_s_per_cm = uniform_real(0.0, 0.3e-9);
    p.wavelengths_per_waveguide = uniform(1, 64);
    p.modulation_rate_hz = uniform_real(1e9, 40e9);
    ElectricalParams e;
    e.router_cycles = uniform(0, 6);
    int n = uniform(1, 48);
    ChipletPlatform platform = homogeneous(n);
    const int variant = uniform(0, 4);
    if (variant == 4) platform = crosslight_baseline(platform);
    TrafficTrace trace;
    TransferRequest t = random_single(platform, trace);
    NetworkTopology topo;
    switch (variant) {
      case 0: topo = build_topology(TopologyKind::bus(), platform, p); break;
      case 1: topo = build_topology(TopologyKind::tree(), platform, p); break;
      case 2: topo = build_topology(TopologyKind::trine(uniform(1, n)), platform, p); break;
      case 3: topo = build_topology(TopologyKind::mesh(), platform, p); break;
      default: break;
    }
    double sim = simulate(trace, topo, platform, p, {}, e).makespan_s;
    double closed = analytic_latency_s(t, topo, platform, p, e);
    o.require(sim == closed, "trace " + std::to_string(i) + ": " + fmt(sim) + " != " + fmt(closed));
  }
  if (o.pass) o.detail = std::to_string(kOracleTraces) + " traces bit-exact";
  return o;
}

PathElement random_element() {
  switch (uniform(0, 6)) {
    case 0: return PathElement::mr_pass();
    case 1: return PathElement::mr_drop();
    case 2: return PathElement::mr_modulate();
    case 3: return PathElement::mzi_stage();
    case 4: return PathElement::coupler();
    case 5: return PathElement::split(uniform(2, 16));
    default: return PathElement::propagate(uniform_real(0.0, 10.0));
  }
}

// 6
Outcome db_properties() {
  Outcome o;
  DeviceParams p;
  for (int i = 0; i < 1000; ++i) {
    DeviceChain a, b;
    for (int k = uniform(0, 30); k > 0; --k) a.push(random_element());
    for (int k = uniform(0, 30); k > 0; --k) b.push(random_element());
    double lhs = path_loss_db(concat(a, b), p), rhs = path_loss_db(a, p) + path_loss_db(b, p);
    o.require(std::abs(lhs - rhs) <= kAdditivityRel * std::max(1.0, std::abs(rhs)), "additivity");
  }
  for (int i = 0; i < 200; ++i) {
    int n = uniform(1, 32);
    ChipletPlatform platform = homogeneous(n);
    TopologyKind kinds[] = {TopologyKind::bus(), TopologyKind::tree(), TopologyKind::trine(uniform(1, n))};
    DeviceParams q;
    auto topo = build_topology(kinds[uniform(0, 2)], platform, q);
    double base = laser_power_mw(topo, q);
    double delta = uniform_real(-5.0, 10.0);
    q.pd_sensitivity_dbm += delta;  // uniform shift of every path's budget
    double shifted = laser_power_mw(topo, q);
    o.require(std::abs(shifted / (base * std::pow(10.0, delta / 10.0)) - 1.0) <= kLaserShiftRel, "laser shift");
  }
  // bus worst-case loss vs reader count; propagation is floorplan-dependent
  DeviceParams b;
  b.waveguide_prop_loss_db_per_cm = 0.0;
  std::vector<double> x, y;
  for (int n = 2; n <= 16; ++n) {
    x.push_back(n);
    y.push_back(worst_case_path(build_topology(TopologyKind::bus(), homogeneous(n), b), b).loss_db);
  }
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  double r2 = sxy * sxy / (sxx * syy);
  o.require(std::abs(1.0 - r2) <= kR2Tol, "bus R^2 = " + fmt(r2));
  const double slope = b.wavelengths_per_waveguide * b.mr_through_loss_db;
  o.require(std::abs(sxy / sxx - slope) <= kSlopeTol, "bus slope " + fmt(sxy / sxx));
  if (o.pass) {
    std::ostringstream os;
    os.precision(15);
    os << "bus slope " << sxy / sxx << " dB/reader, R^2 = " << r2;
    o.detail = os.str();
  }
  return o;
}

std::string strip_topology(ReportRow row) {
  row.topology.clear();
  auto nl = row.audit.find('\n');
  row.audit = row.audit.substr(nl);
  std::ostringstream os;
  os.precision(17);
  const auto& pw = row.power;
  os << row.model << ' ' << pw.laser_mw << ' ' << pw.trimming_mw << ' ' << pw.mzi_static_mw << ' ' << pw.gateway_mw
     << ' ' << pw.mac_mw << ' ' << pw.electrical_mw << ' ' << pw.total_mw << ' ' << pw.energy_j << ' '
     << pw.epb_pj_per_bit.value_or(-1) << ' ' << row.makespan_s << ' ' << row.delivered_bits << ' ' << row.transfers
     << ' ' << row.subnetworks << ' ' << row.stage_count << ' ' << row.worst_loss_db.value_or(-1) << ' '
     << row.reactivations << ' ' << row.inventory.mr_modulators << ' ' << row.inventory.mr_filters << ' '
     << row.inventory.mzi_switches << ' ' << row.inventory.laser_sources << ' ' << row.inventory.pcmc_couplers
     << row.audit;
  return os.str();
}

// 7
Outcome trine1_is_tree() {
  Outcome o;
  DeviceParams p;
  for (int n = 2; n <= 64; ++n) {
    ChipletPlatform platform = homogeneous(n);
    auto tree = build_topology(TopologyKind::tree(), platform, p);
    auto trine = build_topology(TopologyKind::trine(1), platform, p);
    o.require(tree.device_inventory == trine.device_inventory, std::to_string(n) + ": inventory");
    o.require(tree.paths == trine.paths, std::to_string(n) + ": paths");
    o.require(tree.stage_count == trine.stage_count, std::to_string(n) + ": stages");

    RunConfig c = default_config();
    c.platform = platform;
    c.policy.enabled = n % 2 == 0;
    c.network = TopologyKind::trine(1);
    const std::string model = n % 3 == 0 ? "mobilenetv2" : "lenet5";
    auto a = run_cell(c, "trine", model);
    auto b = run_cell(c, "tree", model);
    o.require(strip_topology(a) == strip_topology(b), std::to_string(n) + ": report row");
  }
  if (o.pass) o.detail = "2-64 gateways";
  return o;
}

// 8
Outcome conservation() {
  Outcome o;
  RunConfig c = default_config();
  const std::vector<std::string> topologies{"bus", "tree", "trine", "mesh", "monolithic"};
  auto r = sweep(c, topologies, builtin_model_names());
  for (const auto& row : r.rows) {
    const std::string cell = row.topology + "/" + row.model;
    o.require(row.delivered_bits == row.trace_bytes * 8, cell + ": delivered bits");
    o.require(row.audit.find("injected_bytes = " + std::to_string(row.trace_bytes) + "\n") != std::string::npos,
              cell + ": injected bytes");
  }
  // whole-layer mapping moves every layer's bytes exactly once
  RunConfig per_layer = c;
  per_layer.workload.mapping = MappingMode::PerLayer;
  for (const auto& row : sweep(per_layer, topologies, builtin_model_names()).rows) {
    std::uint64_t bytes = 0;
    for (const auto& l : builtin_model(row.model)) bytes += layer_traffic(l).total_bytes();
    o.require(row.delivered_bits == bytes * 8, row.topology + "/" + row.model + ": per-layer delivered bits");
  }
  auto base = fs::temp_directory_path() / "siphsim_acceptance";
  fs::remove_all(base);
  write_report(r, (base / "a").string());
  write_report(sweep(c, topologies, builtin_model_names()), (base / "b").string());
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(base / "a")) {
    if (!e.is_regular_file()) continue;
    ++files;
    auto rel = fs::relative(e.path(), base / "a");
    o.require(fs::exists(base / "b" / rel) && slurp(e.path()) == slurp(base / "b" / rel), rel.string() + " differs");
  }
  fs::remove_all(base);
  if (o.pass) o.detail = std::to_string(r.rows.size()) + " cells, " + std::to_string(files) + " files identical";
  return o;
}

PcmcPolicy policy_on(double epoch) {
  PcmcPolicy p;
  p.enabled = true;
  p.epoch_s = epoch;
  return p;
}

double energy(const SimResult& s, const NetworkTopology& topo, const ChipletPlatform& platform, const DeviceParams& p,
              const PcmcPolicy& policy) {
  return power_report(s.log, topo, platform, p, policy).energy_j;
}

// 9
Outcome pcmc() {
  Outcome o;
  DeviceParams p;
  const double E = 1e-6;
  ChipletPlatform platform = homogeneous(8);
  ChipletId mem = platform.memory_chiplets.front().id;

  // no transfers; compute keeps the run alive for several epochs
  TrafficTrace idle;
  for (ChipletId c = 0; c < 8; ++c) idle.work.push_back({0, 0, c, mem, 20000 * 256, 256, 20000});
  for (auto kind : {TopologyKind::bus(), TopologyKind::tree(), TopologyKind::trine(8)}) {
    auto topo = build_topology(kind, platform, p);
    auto on = simulate(idle, topo, platform, p, policy_on(E));
    auto off = simulate(idle, topo, platform, p);
    o.require(on.makespan_s > 2 * E, kind.name() + ": idle run shorter than two epochs");
    for (std::size_t g = 0; g < topo.gateways.size(); ++g) {
      if (topo.gateways[g].kind != GatewayKind::Compute) continue;
      o.require(on.log.gateway_active[g] == std::vector<Interval>{{0.0, E}}, kind.name() + ": idle gateway not off at E");
    }
    o.require(energy(on, topo, platform, p, policy_on(E)) < energy(off, topo, platform, p, {}),
              kind.name() + ": idle energy not reduced");
  }

  // every chiplet streams on its own subnetwork for the whole run
  TrafficTrace busy;
  for (ChipletId c = 0; c < 8; ++c) {
    busy.work.push_back({0, 0, c, mem, 0, 0, 0});
    for (int k = 0; k < 200; ++k)
      busy.transfers.push_back({busy.transfers.size(), mem, c, 4096, TransferClass::WeightRead, c});
  }
  {
    auto topo = build_topology(TopologyKind::trine(8), platform, p);
    auto on = simulate(busy, topo, platform, p, policy_on(E));
    auto sched = apply_pcmc_policy(on.log, policy_on(E), p);
    o.require(on.makespan_s > 10 * E, "saturating run too short");
    o.require(sched.deactivation_times.empty(), "saturating trace deactivated a gateway");
  }

  // zero reactivation penalty: never worse
  DeviceParams free = p;
  free.pcmc_switch_time_s = 0.0;
  free.pcmc_switch_energy_j = 0.0;
  for (int i = 0; i < kPcmcTraces; ++i) {
    int n = uniform(1, 16);
    ChipletPlatform pl = homogeneous(n);
    ExecutionPlan plan;
    for (int layer = uniform(1, 6), l = 0; l < layer; ++l)
      for (int s = uniform(1, n); s > 0; --s) {
        WorkSlice w;
        w.layer = static_cast<std::size_t>(l);
        w.chiplet = static_cast<ChipletId>(uniform(0, n - 1));
        w.traffic.weight_bytes = static_cast<std::uint64_t>(uniform(0, 100000));
        w.traffic.input_bytes = static_cast<std::uint64_t>(uniform(1, 100000));
        w.traffic.output_bytes = static_cast<std::uint64_t>(uniform(1, 100000));
        w.traffic.dot_length = 64;
        w.traffic.dot_products = static_cast<std::uint64_t>(uniform(1, 5000000));
        w.traffic.mac_count = 64 * w.traffic.dot_products;
        plan.slices.push_back(w);
      }
    auto trace = build_trace(plan, pl);
    TopologyKind kinds[] = {TopologyKind::bus(), TopologyKind::tree(), TopologyKind::trine(uniform(1, n))};
    auto topo = build_topology(kinds[uniform(0, 2)], pl, free);
    PcmcPolicy pol = policy_on(uniform_real(1e-7, 2e-5));
    pol.deactivate_util_threshold = uniform_real(0.0, 1.0);
    double e_on = energy(simulate(trace, topo, pl, free, pol), topo, pl, free, pol);
    double e_off = energy(simulate(trace, topo, pl, free), topo, pl, free, {});
    o.require(e_on <= e_off, "random trace " + std::to_string(i) + ": " + fmt(e_on) + " > " + fmt(e_off));
  }
  if (o.pass) o.detail = "idle/saturating/" + std::to_string(kPcmcTraces) + " random traces";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = argc > 1 ? argv[1] : "";
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria{
      {"stage-count reproduction", [&] { return stage_counts(cli); }},
      {"subnetwork sizing", sizing},
      {"interposer network orderings", interposer_orderings},
      {"2.5D vs monolithic and mesh orderings", chiplet_orderings},
      {"oracle equivalence", oracle},
      {"dB/exponential properties", db_properties},
      {"Trine(1) == Tree", trine1_is_tree},
      {"conservation & determinism", conservation},
      {"PCMC policy properties", pcmc},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].name << ": " << o.detail
              << std::endl;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
