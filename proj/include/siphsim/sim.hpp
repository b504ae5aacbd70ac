#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "siphsim/device.hpp"
#include "siphsim/platform.hpp"
#include "siphsim/topology.hpp"
#include "siphsim/workload.hpp"

namespace siphsim {

/// Adaptive gateway activation through phase-change couplers.
struct PcmcPolicy {
  bool enabled = false;
  double epoch_s = 10e-6;
  double deactivate_util_threshold = 0.1;

  void validate() const;
};

enum class EventKind : std::uint8_t { EpochBoundary, InjectTransfer, SwitchSetupDone, TransferDone, ComputeDone };

/// Queue entry. Ordered by (time, kind rank, sequence number); epoch
/// boundaries sort ahead of everything else sharing their timestamp.
struct Event {
  double time_s = 0.0;
  EventKind kind = EventKind::InjectTransfer;
  std::uint64_t seq = 0;
  std::size_t payload = 0;

  bool operator>(const Event& o) const;
};

struct Interval {
  double start_s = 0.0;
  double end_s = 0.0;
  bool operator==(const Interval&) const = default;
};

struct TransferRecord {
  std::size_t index = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  std::uint64_t bytes = 0;
  GatewayId src_gateway = 0;
  GatewayId dst_gateway = 0;
  double setup_s = 0.0;
  double pcmc_penalty_s = 0.0;
  std::uint32_t hops = 0;
  bool operator==(const TransferRecord&) const = default;
};

struct ComputeRecord {
  std::size_t work = 0;
  ChipletId chiplet = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  bool operator==(const ComputeRecord&) const = default;
};

/// Shared channel a transfer must hold exclusively (waveguide, mesh link,
/// mesh port, or the on-die memory port of a monolithic chip).
struct ResourceInfo {
  std::string label;
  double busy_s = 0.0;
  bool operator==(const ResourceInfo&) const = default;
};

struct ActivityLog {
  double makespan_s = 0.0;
  std::vector<double> gateway_busy_s;
  std::vector<std::vector<Interval>> gateway_busy;
  std::vector<bool> gateway_is_compute;
  std::vector<ResourceInfo> resources;
  std::vector<std::uint64_t> mzi_reconfigurations;
  std::vector<TransferRecord> transfers;  // indexed by TransferRequest::index
  std::vector<ComputeRecord> compute;
  std::uint64_t injected_bytes = 0;
  std::uint64_t delivered_bytes = 0;
  std::uint64_t transfer_done_events = 0;
  std::uint64_t mesh_bit_hops = 0;
  std::uint64_t switch_setups = 0;

  // Adaptive gateway schedule; gateway_active is empty when the policy is off.
  bool pcmc_enabled = false;
  double epoch_s = 0.0;
  std::vector<std::vector<Interval>> gateway_active;
  std::vector<std::uint64_t> gateway_reactivations;

  bool operator==(const ActivityLog&) const = default;
};

/// Bits per second a transfer on `path` serializes at.
double serialization_rate_bps(const NetworkTopology& topology, const ChipletPlatform& platform,
                              const DeviceParams& params, const ElectricalParams& electrical,
                              const TransferRequest& transfer);

/// Contention-free closed form: setup + serialization + propagation (photonic),
/// hop latency + serialization (mesh), serialization + fixed on-chip latency
/// (monolithic).
double analytic_latency_s(const TransferRequest& transfer, const NetworkTopology& topology,
                          const ChipletPlatform& platform, const DeviceParams& params,
                          const ElectricalParams& electrical = {});

struct SimResult {
  double makespan_s = 0.0;
  ActivityLog log;
};

/// Replays `trace` on `topology` (ignored for monolithic platforms).
/// Throws DeadlockDetected if work remains with no runnable event.
SimResult simulate(const TrafficTrace& trace, const NetworkTopology& topology, const ChipletPlatform& platform,
                   const DeviceParams& params, const PcmcPolicy& policy = {}, const ElectricalParams& electrical = {});

}  // namespace siphsim
