#include "siphsim/power.hpp"

#include <algorithm>
#include <map>

#include "siphsim/errors.hpp"

namespace siphsim {

void PowerBreakdown::update_total() {
  total_mw = laser_mw + trimming_mw + mzi_static_mw + gateway_mw + mac_mw + electrical_mw;
}

namespace {

// Worst adjusted loss per waveguide.
std::map<std::uint32_t, double> worst_loss_by_waveguide(const NetworkTopology& t, const DeviceParams& params,
                                                        const std::vector<bool>* active) {
  std::map<std::uint32_t, double> worst;
  const double per_gateway = params.wavelengths_per_waveguide * params.mr_through_loss_db;
  for (const auto& [key, path] : t.paths) {
    double loss = path_loss_db(path.chain, params);
    if (active != nullptr)
      for (GatewayId g : path.tapped)
        if (!(*active)[g]) loss -= per_gateway;
    auto [it, inserted] = worst.try_emplace(path.waveguide, loss);
    if (!inserted) it->second = std::max(it->second, loss);
  }
  return worst;
}

double laser_for_loss(double loss_db, const DeviceParams& params) {
  return params.wavelengths_per_waveguide *
         wall_plug_laser_power_mw(required_laser_power_mw(loss_db, params), params);
}

}  // namespace

double waveguide_laser_mw(const NetworkTopology& topology, std::uint32_t waveguide, const DeviceParams& params,
                          const std::vector<bool>* active) {
  if (!topology.kind.photonic()) return 0.0;
  auto worst = worst_loss_by_waveguide(topology, params, active);
  auto it = worst.find(waveguide);
  return it == worst.end() ? 0.0 : laser_for_loss(it->second, params);
}

double laser_power_mw(const NetworkTopology& topology, const DeviceParams& params, const std::vector<bool>* active) {
  if (!topology.kind.photonic()) return 0.0;
  double total = 0.0;
  for (const auto& [wg, loss] : worst_loss_by_waveguide(topology, params, active)) total += laser_for_loss(loss, params);
  return total;
}

PowerBreakdown static_power(const NetworkTopology& topology, const DeviceInventory& inventory,
                            const DeviceParams& params) {
  PowerBreakdown p;
  if (inventory.laser_sources > 0) p.laser_mw = laser_power_mw(topology, params);
  p.trimming_mw = static_cast<double>(inventory.mrs()) * params.mr_trim_power_mw;
  p.mzi_static_mw = static_cast<double>(inventory.mzi_switches) * params.mzi_static_power_mw;
  if (topology.kind.photonic()) p.gateway_mw = static_cast<double>(topology.gateways.size()) * params.gateway_power_mw;
  p.update_total();
  return p;
}

double mac_power_mw(const ChipletPlatform& platform, const DeviceParams& params) {
  double total = 0.0;
  for (const auto& c : platform.compute_chiplets)
    total += c.mac_unit_count * (c.mac_unit_size * params.mr_trim_power_mw + platform.mac_unit_power_mw);
  return total;
}

std::uint64_t GatewaySchedule::total_reactivations() const {
  std::uint64_t n = 0;
  for (auto r : reactivations) n += r;
  return n;
}

GatewaySchedule apply_pcmc_policy(const ActivityLog& log, const PcmcPolicy& policy, const DeviceParams& params) {
  (void)params;  // penalties are already folded into the logged busy intervals
  policy.validate();
  const double T = log.makespan_s;
  const double E = policy.epoch_s;
  const std::size_t n = log.gateway_busy.size();

  GatewaySchedule s;
  s.active.resize(n);
  s.reactivations.assign(n, 0);
  for (std::size_t g = 0; g < n; ++g) {
    auto& act = s.active[g];
    act.push_back({0.0, T});
    if (!log.gateway_is_compute[g]) continue;

    const auto& busy = log.gateway_busy[g];
    bool on = true;
    std::size_t next = 0;  // next interval to start
    double b = E;

    auto boundary = [&] {
      if (on) {
        double used = 0.0;
        bool in_flight = false;
        for (std::size_t i = 0; i < next; ++i) {
          used += std::max(0.0, std::min(busy[i].end_s, b) - std::max(busy[i].start_s, b - E));
          in_flight = in_flight || busy[i].end_s > b;
        }
        if (!in_flight && used / E < policy.deactivate_util_threshold) {
          on = false;
          act.back().end_s = b;
          s.deactivation_times.push_back(b);
        }
      }
      b += E;
    };

    for (; next < busy.size(); ++next) {
      while (b < T && b <= busy[next].start_s) boundary();
      if (!on) {
        on = true;
        ++s.reactivations[g];
        act.push_back({busy[next].start_s, T});
      }
    }
    while (b < T) boundary();
  }
  for (auto& act : s.active) {
    for (auto& iv : act) {
      iv.start_s = std::min(iv.start_s, T);
      iv.end_s = std::min(iv.end_s, T);
    }
    std::erase_if(act, [](const Interval& iv) { return !(iv.end_s > iv.start_s); });
  }
  std::sort(s.deactivation_times.begin(), s.deactivation_times.end());
  return s;
}

double EnergyBreakdown::epb_pj_per_bit() const {
  if (delivered_bits == 0) throw ZeroBits("energy per bit is undefined when no bits were delivered");
  return total_j * 1e12 / static_cast<double>(delivered_bits);
}

EnergyBreakdown run_energy(const ActivityLog& log, const NetworkTopology& topology, const PowerBreakdown& breakdown,
                           const DeviceParams& params, const PcmcPolicy& policy, const ElectricalParams& electrical) {
  const double T = log.makespan_s;
  EnergyBreakdown e;
  e.trimming_j = breakdown.trimming_mw * 1e-3 * T;
  e.mzi_static_j = breakdown.mzi_static_mw * 1e-3 * T;
  e.mac_j = breakdown.mac_mw * 1e-3 * T;
  e.electrical_j = static_cast<double>(log.mesh_bit_hops) * electrical.epb_per_hop_pj * 1e-12;
  e.delivered_bits = log.delivered_bytes * 8;

  const bool adaptive = policy.enabled && log.pcmc_enabled && !log.gateway_busy.empty();
  if (!adaptive) {
    e.laser_j = breakdown.laser_mw * 1e-3 * T;
    e.gateway_j = breakdown.gateway_mw * 1e-3 * T;
  } else {
    GatewaySchedule sched = apply_pcmc_policy(log, policy, params);
    const double per_gateway_mw =
        topology.gateways.empty() ? 0.0 : breakdown.gateway_mw / static_cast<double>(topology.gateways.size());
    std::vector<double> cuts{0.0, T};
    for (const auto& act : sched.active) {
      double on_time = 0.0;
      for (const auto& iv : act) {
        on_time += iv.end_s - iv.start_s;
        cuts.push_back(iv.start_s);
        cuts.push_back(iv.end_s);
      }
      e.gateway_j += per_gateway_mw * 1e-3 * on_time;
    }
    e.pcmc_switch_j = static_cast<double>(sched.total_reactivations()) * params.pcmc_switch_energy_j;

    bool has_taps = std::any_of(topology.paths.begin(), topology.paths.end(),
                                [](const auto& kv) { return !kv.second.tapped.empty(); });
    if (!has_taps || breakdown.laser_mw == 0.0) {
      e.laser_j = breakdown.laser_mw * 1e-3 * T;
    } else {
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      std::vector<bool> mask(sched.active.size());
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        for (std::size_t g = 0; g < mask.size(); ++g)
          mask[g] = std::any_of(sched.active[g].begin(), sched.active[g].end(),
                                [a](const Interval& iv) { return iv.start_s <= a && a < iv.end_s; });
        e.laser_j += laser_power_mw(topology, params, &mask) * 1e-3 * (b - a);
      }
    }
  }
  e.total_j = e.laser_j + e.trimming_j + e.mzi_static_j + e.gateway_j + e.mac_j + e.electrical_j + e.pcmc_switch_j;
  return e;
}

PowerBreakdown power_report(const ActivityLog& log, const NetworkTopology& topology, const ChipletPlatform& platform,
                            const DeviceParams& params, const PcmcPolicy& policy, const ElectricalParams& electrical,
                            bool adaptive_inventory) {
  PowerBreakdown p;
  if (!platform.monolithic)
    p = static_power(topology, enumerate_devices(topology, platform, params, adaptive_inventory), params);
  p.mac_mw = mac_power_mw(platform, params);
  EnergyBreakdown e = run_energy(log, topology, p, params, policy, electrical);
  if (log.makespan_s > 0) p.electrical_mw = e.electrical_j / log.makespan_s * 1e3;
  p.update_total();
  p.energy_j = e.total_j;
  if (e.delivered_bits > 0) p.epb_pj_per_bit = e.epb_pj_per_bit();
  return p;
}

}  // namespace siphsim
