#include "siphsim/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "siphsim/errors.hpp"

namespace siphsim {

std::string to_string(MappingMode mode) { return mode == MappingMode::PerLayer ? "layer" : "partitioned"; }

void RunConfig::validate() const {
  device.validate();
  electrical.validate();
  if (policy.enabled) policy.validate();
  platform.validate();
  if (workload.packet_bytes == 0) throw ConfigError("packet_bytes must be >= 1", 0, "workload.packet_bytes");
  if (workload.bit_width < 0) throw ConfigError("bit_width must be >= 0", 0, "workload.bit_width");
}

RunConfig default_config() {
  RunConfig c;
  int k = subnetwork_count_for_memory_bw(c.platform.total_memory_bandwidth(), c.device,
                                         c.platform.compute_chiplets.size());
  c.network = TopologyKind::trine(k);
  return c;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Ctx {
  std::size_t line;
  std::string key;
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(msg, line, key); }
};

double to_double(const std::string& v, const Ctx& ctx) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) ctx.fail("expected a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& v, const Ctx& ctx) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) ctx.fail("expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v, const Ctx& ctx) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  ctx.fail("expected a boolean, got '" + v + "'");
}

std::vector<std::string> split_csv(const std::string& v) {
  std::vector<std::string> parts;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(trim(item));
  return parts;
}

using Setter = std::function<void(const std::string&, const Ctx&)>;

struct Pending {
  std::string preset;
  std::vector<ComputeChiplet> chiplets;
  std::vector<MemoryChiplet> memories;
  bool subnetworks_set = false;
};

std::map<std::string, Setter> make_setters(RunConfig& c, Pending& pend) {
  std::map<std::string, Setter> s;
  auto dbl = [&s](const std::string& key, double& field) {
    s[key] = [&field](const std::string& v, const Ctx& ctx) { field = to_double(v, ctx); };
  };
  auto integer = [&s](const std::string& key, int& field) {
    s[key] = [&field](const std::string& v, const Ctx& ctx) { field = static_cast<int>(to_int(v, ctx)); };
  };

  DeviceParams& d = c.device;
  dbl("device.mr_through_loss_db", d.mr_through_loss_db);
  dbl("device.mr_drop_loss_db", d.mr_drop_loss_db);
  dbl("device.mr_modulator_insertion_db", d.mr_modulator_insertion_db);
  dbl("device.mzi_insertion_loss_db", d.mzi_insertion_loss_db);
  dbl("device.waveguide_prop_loss_db_per_cm", d.waveguide_prop_loss_db_per_cm);
  dbl("device.coupler_loss_db", d.coupler_loss_db);
  dbl("device.splitter_loss_db", d.splitter_loss_db);
  dbl("device.pd_sensitivity_dbm", d.pd_sensitivity_dbm);
  dbl("device.link_margin_db", d.link_margin_db);
  dbl("device.laser_wall_plug_efficiency", d.laser_wall_plug_efficiency);
  dbl("device.mr_trim_power_mw", d.mr_trim_power_mw);
  dbl("device.mzi_static_power_mw", d.mzi_static_power_mw);
  dbl("device.mzi_switch_time_s", d.mzi_switch_time_s);
  dbl("device.modulation_rate_hz", d.modulation_rate_hz);
  dbl("device.gateway_clock_hz", d.gateway_clock_hz);
  integer("device.wavelengths_per_waveguide", d.wavelengths_per_waveguide);
  dbl("device.pcmc_switch_time_s", d.pcmc_switch_time_s);
  dbl("device.pcmc_switch_energy_j", d.pcmc_switch_energy_j);
  dbl("device.gateway_power_mw", d.gateway_power_mw);
  dbl("device.chiplet_bw_cap_bytes_per_s", d.chiplet_bw_cap_bytes_per_s);
  integer("device.gateway_word_bits", d.gateway_word_bits);
  dbl("device.group_delay_s_per_cm", d.group_delay_s_per_cm);

  dbl("electrical.epb_per_hop_pj", c.electrical.epb_per_hop_pj);
  integer("electrical.router_cycles", c.electrical.router_cycles);
  dbl("electrical.wire_rate_gbps", c.electrical.wire_rate_gbps);
  dbl("electrical.wire_delay_s_per_cm", c.electrical.wire_delay_s_per_cm);

  s["policy.enabled"] = [&c](const std::string& v, const Ctx& ctx) { c.policy.enabled = to_bool(v, ctx); };
  dbl("policy.epoch_s", c.policy.epoch_s);
  dbl("policy.threshold", c.policy.deactivate_util_threshold);

  s["network.kind"] = [&c](const std::string& v, const Ctx& ctx) {
    if (v == "bus") c.network.type = TopologyType::Bus;
    else if (v == "tree") c.network.type = TopologyType::Tree;
    else if (v == "trine") c.network.type = TopologyType::Trine;
    else if (v == "mesh") c.network.type = TopologyType::ElectricalMesh;
    else ctx.fail("unknown network kind '" + v + "' (bus, tree, trine, mesh)");
  };
  s["network.subnetworks"] = [&c, &pend](const std::string& v, const Ctx& ctx) {
    c.network.subnetworks = static_cast<int>(to_int(v, ctx));
    pend.subnetworks_set = true;
  };
  integer("network.mesh_rows", c.network.mesh_rows);
  integer("network.mesh_cols", c.network.mesh_cols);

  s["platform.preset"] = [&pend](const std::string& v, const Ctx& ctx) {
    if (v != "interposer" && v != "crosslight") ctx.fail("unknown platform preset '" + v + "'");
    pend.preset = v;
  };
  s["platform.chiplet"] = [&pend](const std::string& v, const Ctx& ctx) {
    auto parts = split_csv(v);
    if (parts.size() != 3) ctx.fail("expected 'mac_unit_size, count, clock_hz'");
    ComputeChiplet ch;
    ch.mac_unit_size = static_cast<int>(to_int(parts[0], ctx));
    ch.mac_unit_count = static_cast<int>(to_int(parts[1], ctx));
    ch.clock_hz = to_double(parts[2], ctx);
    pend.chiplets.push_back(ch);
  };
  s["platform.memory"] = [&pend](const std::string& v, const Ctx& ctx) {
    auto parts = split_csv(v);
    if (parts.size() != 2) ctx.fail("expected 'bandwidth_bytes_per_s, glb_bytes'");
    pend.memories.push_back({0, to_double(parts[0], ctx), to_double(parts[1], ctx)});
  };
  dbl("platform.mac_unit_power_mw", c.platform.mac_unit_power_mw);
  dbl("platform.onchip_transfer_latency_s", c.platform.onchip_transfer_latency_s);

  s["workload.model"] = [&c](const std::string& v, const Ctx&) { c.workload.model = v; };
  s["workload.model_file"] = [&c](const std::string& v, const Ctx&) { c.workload.model_file = v; };
  integer("workload.bit_width", c.workload.bit_width);
  s["workload.packet_bytes"] = [&c](const std::string& v, const Ctx& ctx) {
    long long n = to_int(v, ctx);
    if (n < 1) ctx.fail("packet_bytes must be >= 1");
    c.workload.packet_bytes = static_cast<std::uint64_t>(n);
  };
  s["workload.mapping"] = [&c](const std::string& v, const Ctx& ctx) {
    if (v == "partitioned") c.workload.mapping = MappingMode::Partitioned;
    else if (v == "layer") c.workload.mapping = MappingMode::PerLayer;
    else ctx.fail("unknown mapping '" + v + "' (partitioned, layer)");
  };

  s["report.baseline"] = [&c](const std::string& v, const Ctx&) { c.baseline = v; };
  s["report.out"] = [&c](const std::string& v, const Ctx&) { c.out_dir = v; };
  return s;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  Pending pend;
  auto setters = make_setters(c, pend);
  static const std::set<std::string> sections{"device", "electrical", "policy", "network", "platform", "workload",
                                              "report"};

  std::set<std::string> seen;
  std::string section;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header '" + line + "'", lineno);
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) throw ConfigError("unknown section [" + section + "]", lineno);
      if (!seen.insert(section).second) throw ConfigError("duplicate section [" + section + "]", lineno);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError("key outside of any section", lineno, key);
    std::string full = section + "." + key;
    auto it = setters.find(full);
    if (it == setters.end()) throw ConfigError("unknown key", lineno, full);
    if (value.empty()) throw ConfigError("missing value", lineno, full);
    it->second(value, Ctx{lineno, full});
  }
  if (!seen.count("network")) throw ConfigError("missing required section [network]");

  // Preset first, then explicit chiplet/memory lines replace its lists.
  ChipletPlatform base = pend.preset == "crosslight" ? crosslight_platform() : interposer_eval_platform();
  c.platform_name = pend.preset.empty() ? "interposer" : pend.preset;
  c.platform.compute_chiplets = base.compute_chiplets;
  c.platform.memory_chiplets = base.memory_chiplets;
  if (!pend.chiplets.empty()) {
    c.platform.compute_chiplets = pend.chiplets;
    c.platform_name = "custom";
  }
  if (!pend.memories.empty()) {
    c.platform.memory_chiplets = pend.memories;
    c.platform_name = "custom";
  }
  ChipletId next = 0;
  for (auto& ch : c.platform.compute_chiplets) ch.id = next++;
  for (auto& m : c.platform.memory_chiplets) m.id = next++;

  try {
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (c.network.type == TopologyType::Trine && !pend.subnetworks_set)
    c.network.subnetworks = subnetwork_count_for_memory_bw(c.platform.total_memory_bandwidth(), c.device,
                                                           c.platform.compute_chiplets.size());
  if (c.network.type != TopologyType::Trine && !pend.subnetworks_set) c.network.subnetworks = 1;
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace siphsim
