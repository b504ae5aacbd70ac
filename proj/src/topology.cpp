#include "siphsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "siphsim/errors.hpp"

namespace siphsim {

std::string TopologyKind::name() const {
  switch (type) {
    case TopologyType::Bus: return "bus";
    case TopologyType::Tree: return "tree";
    case TopologyType::Trine: return "trine";
    case TopologyType::ElectricalMesh: return "mesh";
  }
  return "?";
}

double manhattan_cm(Position a, Position b) { return std::abs(a.x_cm - b.x_cm) + std::abs(a.y_cm - b.y_cm); }

int stage_count_for(std::size_t compute_gateways, int subnetworks) {
  if (subnetworks < 1 || compute_gateways == 0) return 0;
  std::size_t k = static_cast<std::size_t>(subnetworks);
  std::size_t per = (compute_gateways + k - 1) / k;
  int stages = 0;
  while ((std::size_t{1} << stages) < per) ++stages;
  return stages;
}

int subnetwork_count_for_memory_bw(double memory_bw, const DeviceParams& params, std::size_t compute_gateways) {
  double subnet_bw = params.waveguide_rate_bps() / 8.0;
  double need = std::ceil(memory_bw / subnet_bw);
  double hi = static_cast<double>(std::max<std::size_t>(compute_gateways, 1));
  return static_cast<int>(std::clamp(need, 1.0, hi));
}

std::size_t NetworkTopology::compute_gateway_count() const {
  return static_cast<std::size_t>(
      std::count_if(gateways.begin(), gateways.end(), [](const GatewayNode& g) { return g.kind == GatewayKind::Compute; }));
}

GatewayId NetworkTopology::compute_gateway(ChipletId chiplet) const {
  for (const auto& g : gateways)
    if (g.kind == GatewayKind::Compute && g.chiplet == chiplet) return g.id;
  throw InvalidPlatform("no compute gateway for chiplet " + std::to_string(chiplet));
}

GatewayId NetworkTopology::memory_gateway(ChipletId memory, ChipletId compute_chiplet) const {
  int subnet = gateways.at(compute_gateway(compute_chiplet)).subnetwork;
  for (const auto& g : gateways)
    if (g.kind == GatewayKind::Memory && g.chiplet == memory && g.subnetwork == subnet) return g.id;
  throw InvalidPlatform("no memory gateway for chiplet " + std::to_string(memory));
}

const Path& NetworkTopology::route(ChipletId src, ChipletId dst) const {
  GatewayId s, d;
  if (gateways.empty()) throw InvalidPlatform("empty topology");
  bool src_is_compute = std::any_of(gateways.begin(), gateways.end(), [&](const GatewayNode& g) {
    return g.kind == GatewayKind::Compute && g.chiplet == src;
  });
  if (src_is_compute) {
    s = compute_gateway(src);
    d = memory_gateway(dst, src);
  } else {
    d = compute_gateway(dst);
    s = memory_gateway(src, dst);
  }
  auto it = paths.find({s, d});
  if (it == paths.end()) throw InvalidPlatform("no path between chiplets");
  return it->second;
}

namespace {

struct Layout {
  std::vector<Position> compute;
  std::vector<Position> memory;
};

// Compute chiplets in serpentine order on a near-square grid (consecutive ids
// are one pitch apart); memory chiplets along the y = 0 edge.
Layout photonic_layout(std::size_t n_compute, std::size_t n_memory, double pitch) {
  Layout out;
  std::size_t cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_compute))));
  cols = std::max<std::size_t>(cols, 1);
  for (std::size_t i = 0; i < n_compute; ++i) {
    std::size_t row = i / cols, col = i % cols;
    if (row % 2 == 1) col = cols - 1 - col;
    out.compute.push_back({static_cast<double>(col) * pitch, static_cast<double>(row + 1) * pitch});
  }
  std::size_t start = n_memory < cols ? (cols - n_memory) / 2 : 0;
  for (std::size_t j = 0; j < n_memory; ++j) out.memory.push_back({static_cast<double>(start + j) * pitch, 0.0});
  return out;
}

DeviceChain link_chain(double length_cm, std::size_t mzi_stages, std::size_t mr_passes) {
  DeviceChain c;
  c.push(PathElement::mr_modulate())
      .push(PathElement::coupler())
      .push(PathElement::propagate(length_cm))
      .push(PathElement::mzi_stage(), mzi_stages)
      .push(PathElement::mr_pass(), mr_passes)
      .push(PathElement::coupler())
      .push(PathElement::mr_drop());
  return c;
}

// Balanced binary switch tree over `leaves`; returns per-leaf settings, root first.
void build_switch_tree(std::size_t lo, std::size_t hi, std::vector<MziSetting>& prefix, std::uint32_t& next_mzi,
                       std::vector<std::vector<MziSetting>>& out) {
  if (hi - lo == 1) {
    out[lo] = prefix;
    return;
  }
  std::uint32_t id = next_mzi++;
  std::size_t mid = lo + (hi - lo + 1) / 2;
  prefix.push_back({id, 0});
  build_switch_tree(lo, mid, prefix, next_mzi, out);
  prefix.back().port = 1;
  build_switch_tree(mid, hi, prefix, next_mzi, out);
  prefix.pop_back();
}

void add_gateways(NetworkTopology& t, const ChipletPlatform& platform, const Layout& layout, int memory_ports) {
  GatewayId next = 0;
  for (std::size_t i = 0; i < platform.compute_chiplets.size(); ++i) {
    int subnet = t.kind.type == TopologyType::Trine ? static_cast<int>(i % t.kind.subnetworks) : 0;
    t.gateways.push_back({next++, platform.compute_chiplets[i].id, GatewayKind::Compute, layout.compute[i], subnet});
  }
  for (std::size_t j = 0; j < platform.memory_chiplets.size(); ++j)
    for (int s = 0; s < memory_ports; ++s)
      t.gateways.push_back({next++, platform.memory_chiplets[j].id, GatewayKind::Memory, layout.memory[j], s});
}

void build_switched(NetworkTopology& t, const ChipletPlatform& platform) {
  const std::size_t n = platform.compute_chiplets.size();
  const int k = t.kind.subnetworks;
  Layout layout = photonic_layout(n, platform.memory_chiplets.size(), t.pitch_cm);
  add_gateways(t, platform, layout, k);
  t.stage_count = stage_count_for(n, k);

  std::uint32_t next_mzi = 0;
  for (const auto& mem : t.gateways) {
    if (mem.kind != GatewayKind::Memory) continue;
    Waveguide wg{static_cast<std::uint32_t>(t.waveguides.size()), mem.subnetwork, mem.chiplet, WaveguideRole::Switched, {}};
    for (const auto& g : t.gateways)
      if (g.kind == GatewayKind::Compute && g.subnetwork == mem.subnetwork) wg.members.push_back(g.id);

    std::vector<std::vector<MziSetting>> settings(wg.members.size());
    std::vector<MziSetting> prefix;
    if (!wg.members.empty()) build_switch_tree(0, wg.members.size(), prefix, next_mzi, settings);

    for (std::size_t leaf = 0; leaf < wg.members.size(); ++leaf) {
      const auto& cg = t.gateways[wg.members[leaf]];
      double len = manhattan_cm(cg.pos, mem.pos);
      Path p;
      p.chain = link_chain(len, settings[leaf].size(), 0);
      p.waveguide = wg.id;
      p.mzis = settings[leaf];
      p.length_cm = len;
      p.src = mem.id;
      p.dst = cg.id;
      t.paths.emplace(std::pair{mem.id, cg.id}, p);
      p.src = cg.id;
      p.dst = mem.id;
      t.paths.emplace(std::pair{cg.id, mem.id}, p);
    }
    t.waveguides.push_back(std::move(wg));
  }
  t.mzi_count = next_mzi;
}

// Read waveguide: memory broadcasts (SWMR); reader j passes the filter sets of
// readers 0..j-1. Write waveguide: every writer shares one waveguide and passes
// the other writers' MR sets (downstream modulators plus the memory MRG).
void build_bus(NetworkTopology& t, const ChipletPlatform& platform, const DeviceParams& params) {
  const std::size_t n = platform.compute_chiplets.size();
  const std::size_t w = static_cast<std::size_t>(params.wavelengths_per_waveguide);
  Layout layout = photonic_layout(n, platform.memory_chiplets.size(), t.pitch_cm);
  add_gateways(t, platform, layout, 1);

  for (const auto& mem : t.gateways) {
    if (mem.kind != GatewayKind::Memory) continue;
    Waveguide rd{static_cast<std::uint32_t>(t.waveguides.size()), 0, mem.chiplet, WaveguideRole::BusRead, {}};
    Waveguide wr{rd.id + 1, 0, mem.chiplet, WaveguideRole::BusWrite, {}};
    for (std::size_t j = 0; j < n; ++j) {
      rd.members.push_back(static_cast<GatewayId>(j));
      wr.members.push_back(static_cast<GatewayId>(j));
    }
    double lead = n > 0 ? manhattan_cm(mem.pos, layout.compute[0]) : 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      GatewayId cg = static_cast<GatewayId>(j);
      double len = lead + static_cast<double>(j) * t.pitch_cm;

      Path r;
      r.src = mem.id;
      r.dst = cg;
      r.chain = link_chain(len, 0, w * j);
      r.waveguide = rd.id;
      for (std::size_t q = 0; q < j; ++q) r.tapped.push_back(static_cast<GatewayId>(q));
      r.length_cm = len;
      t.paths.emplace(std::pair{mem.id, cg}, std::move(r));

      Path wp;
      wp.src = cg;
      wp.dst = mem.id;
      wp.chain = link_chain(len, 0, w * (n - 1));
      wp.waveguide = wr.id;
      for (std::size_t q = 0; q < n; ++q)
        if (q != j) wp.tapped.push_back(static_cast<GatewayId>(q));
      wp.length_cm = len;
      t.paths.emplace(std::pair{cg, mem.id}, std::move(wp));
    }
    t.waveguides.push_back(std::move(rd));
    t.waveguides.push_back(std::move(wr));
  }
}

void build_mesh(NetworkTopology& t, const ChipletPlatform& platform) {
  const std::size_t n_c = platform.compute_chiplets.size();
  const std::size_t n_m = platform.memory_chiplets.size();
  const std::size_t total = n_c + n_m;
  std::size_t cols = static_cast<std::size_t>(t.kind.mesh_cols);
  std::size_t rows = static_cast<std::size_t>(t.kind.mesh_rows);
  if (rows == 0 || cols == 0) {
    cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(total))));
    rows = (total + cols - 1) / cols;
  }
  if (rows * cols < total) throw InvalidPlatform("mesh grid smaller than chiplet count");
  t.mesh_rows = static_cast<int>(rows);
  t.mesh_cols = static_cast<int>(cols);

  std::vector<bool> used(rows * cols, false);
  std::vector<std::size_t> mem_slot(n_m), comp_slot(n_c);
  std::size_t start = n_m <= cols ? (cols - n_m) / 2 : 0;
  for (std::size_t j = 0; j < n_m; ++j) {
    mem_slot[j] = start + j;
    used[start + j] = true;
  }
  std::size_t slot = 0;
  for (std::size_t i = 0; i < n_c; ++i) {
    while (used[slot]) ++slot;
    comp_slot[i] = slot;
    used[slot] = true;
  }

  auto pos_of = [&](std::size_t s) {
    return Position{static_cast<double>(s % cols) * t.pitch_cm, static_cast<double>(s / cols) * t.pitch_cm};
  };
  Layout layout;
  for (auto s : comp_slot) layout.compute.push_back(pos_of(s));
  for (auto s : mem_slot) layout.memory.push_back(pos_of(s));
  add_gateways(t, platform, layout, 1);

  auto slot_of = [&](const GatewayNode& g) {
    return g.kind == GatewayKind::Compute ? comp_slot[g.id] : mem_slot[g.id - n_c];
  };
  auto xy_route = [&](std::size_t from, std::size_t to) {
    std::vector<std::uint32_t> r;
    std::size_t x = from % cols, y = from / cols;
    const std::size_t tx = to % cols, ty = to / cols;
    r.push_back(static_cast<std::uint32_t>(from));
    while (x != tx) {
      x = x < tx ? x + 1 : x - 1;
      r.push_back(static_cast<std::uint32_t>(y * cols + x));
    }
    while (y != ty) {
      y = y < ty ? y + 1 : y - 1;
      r.push_back(static_cast<std::uint32_t>(y * cols + x));
    }
    return r;
  };

  for (const auto& a : t.gateways) {
    for (const auto& b : t.gateways) {
      if (a.kind == b.kind) continue;
      Path p;
      p.src = a.id;
      p.dst = b.id;
      p.routers = xy_route(slot_of(a), slot_of(b));
      p.length_cm = static_cast<double>(p.hops()) * t.pitch_cm;
      t.paths.emplace(std::pair{a.id, b.id}, std::move(p));
    }
  }
}

}  // namespace

NetworkTopology build_topology(const TopologyKind& kind, const ChipletPlatform& platform, const DeviceParams& params) {
  platform.validate();
  params.validate();
  const std::size_t n = platform.compute_chiplets.size();

  NetworkTopology t;
  t.kind = kind;
  if (kind.type == TopologyType::Tree) t.kind.subnetworks = 1;
  if (kind.type == TopologyType::Trine &&
      (kind.subnetworks < 1 || static_cast<std::size_t>(kind.subnetworks) > n))
    throw InvalidSubnetworkCount("subnetwork count " + std::to_string(kind.subnetworks) + " outside [1, " +
                                 std::to_string(n) + "]");

  switch (kind.type) {
    case TopologyType::Bus: build_bus(t, platform, params); break;
    case TopologyType::Tree:
    case TopologyType::Trine: build_switched(t, platform); break;
    case TopologyType::ElectricalMesh: build_mesh(t, platform); break;
  }
  t.device_inventory = enumerate_devices(t, platform, params, false);
  return t;
}

WorstPath worst_case_path(const NetworkTopology& t, const DeviceParams& params) {
  if (!t.kind.photonic()) throw NotPhotonic("worst_case_path needs a photonic topology");
  WorstPath best;
  bool found = false;
  // std::map iterates in (src, dst) order, so strict > keeps the lowest pair on ties.
  for (const auto& [key, path] : t.paths) {
    double loss = path_loss_db(path.chain, params);
    if (!found || loss > best.loss_db) {
      best = {key.first, key.second, path.chain, loss};
      found = true;
    }
  }
  return best;
}

DeviceInventory enumerate_devices(const NetworkTopology& t, const ChipletPlatform& platform,
                                  const DeviceParams& params, bool adaptive) {
  DeviceInventory inv;
  if (!t.kind.photonic()) return inv;
  const long long w = params.wavelengths_per_waveguide;
  const long long n_c = static_cast<long long>(platform.compute_chiplets.size());
  const long long n_m = static_cast<long long>(platform.memory_chiplets.size());
  const long long k = t.kind.type == TopologyType::Bus ? 1 : t.kind.subnetworks;

  // Compute chiplet: one filter set and one modulator set. Memory chiplet: one
  // modulator set per subnetwork and one MRG filter set per writing chiplet.
  inv.mr_modulators = (n_c + n_m * k) * w;
  inv.mr_filters = (n_c + n_m * n_c) * w;
  inv.mzi_switches = t.mzi_count;
  inv.laser_sources = static_cast<long long>(t.waveguides.size());
  if (adaptive) inv.pcmc_couplers = static_cast<long long>(t.gateways.size());
  return inv;
}

}  // namespace siphsim
