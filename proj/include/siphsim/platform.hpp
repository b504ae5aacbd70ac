#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace siphsim {

using ChipletId = std::uint32_t;

struct ComputeChiplet {
  ChipletId id = 0;
  int mac_unit_size = 1;   // lanes per MAC unit (dot-product length per pass)
  int mac_unit_count = 1;
  double clock_hz = 2e9;

  long long lanes() const { return static_cast<long long>(mac_unit_size) * mac_unit_count; }
};

struct MemoryChiplet {
  ChipletId id = 0;
  double bandwidth_bytes_per_s = 96e9;
  double glb_bytes = 16.0 * 1024 * 1024;
};

/// Compute chiplets plus memory chiplets sharing one interposer.
struct ChipletPlatform {
  std::vector<ComputeChiplet> compute_chiplets;
  std::vector<MemoryChiplet> memory_chiplets;
  bool monolithic = false;
  double mac_unit_power_mw = 5.0;
  /// Fixed latency of one on-chip transfer on a monolithic die.
  double onchip_transfer_latency_s = 20e-9;

  /// Throws InvalidPlatform.
  void validate() const;

  const ComputeChiplet& compute(ChipletId id) const;
  const MemoryChiplet& memory(ChipletId id) const;
  bool is_compute(ChipletId id) const;
  bool is_memory(ChipletId id) const;
  long long total_lanes() const;
  double total_memory_bandwidth() const;
};

/// Builds a platform from (mac_unit_size, mac_unit_count) pairs with ids
/// assigned in order; memory chiplets follow the compute chiplets.
ChipletPlatform make_platform(const std::vector<std::pair<int, int>>& compute, double clock_hz,
                              const std::vector<MemoryChiplet>& memory);

/// 32 homogeneous compute chiplets and one 96 GB/s memory chiplet; the
/// interposer-network evaluation platform.
ChipletPlatform interposer_eval_platform();

/// Heterogeneous photonic-MAC platform: two chiplets each of 9, 25, 49 and 128
/// lane MAC units, 64 units per chiplet, one 96 GB/s memory chiplet.
ChipletPlatform crosslight_platform();

}  // namespace siphsim
