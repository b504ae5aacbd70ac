#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "siphsim/device.hpp"
#include "siphsim/platform.hpp"
#include "siphsim/sim.hpp"
#include "siphsim/topology.hpp"

namespace siphsim {

struct PowerBreakdown {
  double laser_mw = 0.0;
  double trimming_mw = 0.0;
  double mzi_static_mw = 0.0;
  double gateway_mw = 0.0;
  double mac_mw = 0.0;
  double electrical_mw = 0.0;  // average over the run
  double total_mw = 0.0;
  double energy_j = 0.0;
  std::optional<double> epb_pj_per_bit;

  void update_total();
};

/// Wall-plug power of one waveguide's laser: wavelengths x the power its
/// worst path needs. `active` (per gateway) drops the through-loss of MR
/// sets belonging to deactivated tapped gateways; null means all active.
double waveguide_laser_mw(const NetworkTopology& topology, std::uint32_t waveguide, const DeviceParams& params,
                          const std::vector<bool>* active = nullptr);
double laser_power_mw(const NetworkTopology& topology, const DeviceParams& params,
                      const std::vector<bool>* active = nullptr);

/// Power fields only; mac_mw and electrical_mw stay zero.
PowerBreakdown static_power(const NetworkTopology& topology, const DeviceInventory& inventory,
                            const DeviceParams& params);

/// Thermal lock of every MAC lane plus the per-unit electronics.
double mac_power_mw(const ChipletPlatform& platform, const DeviceParams& params);

struct GatewaySchedule {
  std::vector<std::vector<Interval>> active;  // per gateway, clipped to the makespan
  std::vector<std::uint64_t> reactivations;
  std::vector<double> deactivation_times;  // one entry per deactivation event
  std::uint64_t total_reactivations() const;
  bool operator==(const GatewaySchedule&) const = default;
};

/// Recomputes the adaptive schedule from busy intervals alone: at each
/// boundary b = nE < makespan an active compute gateway that is idle at b
/// and busy less than threshold x E in [b - E, b) is switched off; it comes
/// back when its next transfer starts.
GatewaySchedule apply_pcmc_policy(const ActivityLog& log, const PcmcPolicy& policy, const DeviceParams& params);

struct EnergyBreakdown {
  double laser_j = 0.0;
  double trimming_j = 0.0;
  double mzi_static_j = 0.0;
  double gateway_j = 0.0;
  double mac_j = 0.0;
  double electrical_j = 0.0;
  double pcmc_switch_j = 0.0;
  double total_j = 0.0;
  std::uint64_t delivered_bits = 0;

  /// Throws ZeroBits when nothing was delivered.
  double epb_pj_per_bit() const;
};

/// `breakdown` supplies the static powers (see static_power) and mac_mw.
EnergyBreakdown run_energy(const ActivityLog& log, const NetworkTopology& topology, const PowerBreakdown& breakdown,
                           const DeviceParams& params, const PcmcPolicy& policy = {},
                           const ElectricalParams& electrical = {});

/// static_power + MAC power + run energy folded into one breakdown.
PowerBreakdown power_report(const ActivityLog& log, const NetworkTopology& topology, const ChipletPlatform& platform,
                            const DeviceParams& params, const PcmcPolicy& policy = {},
                            const ElectricalParams& electrical = {}, bool adaptive_inventory = false);

}  // namespace siphsim
