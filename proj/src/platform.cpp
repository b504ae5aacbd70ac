#include "siphsim/platform.hpp"

#include <algorithm>
#include <set>

#include "siphsim/errors.hpp"

namespace siphsim {

void ChipletPlatform::validate() const {
  if (compute_chiplets.empty()) throw InvalidPlatform("platform has no compute chiplet");
  if (memory_chiplets.empty()) throw InvalidPlatform("platform has no memory chiplet");
  std::set<ChipletId> ids;
  for (const auto& c : compute_chiplets) {
    if (c.mac_unit_size < 1 || c.mac_unit_count < 1) throw InvalidPlatform("MAC unit size and count must be >= 1");
    if (!(c.clock_hz > 0)) throw InvalidPlatform("chiplet clock must be > 0");
    if (!ids.insert(c.id).second) throw InvalidPlatform("duplicate chiplet id " + std::to_string(c.id));
  }
  for (const auto& m : memory_chiplets) {
    if (!(m.bandwidth_bytes_per_s > 0)) throw InvalidPlatform("memory bandwidth must be > 0");
    if (!ids.insert(m.id).second) throw InvalidPlatform("duplicate chiplet id " + std::to_string(m.id));
  }
  if (mac_unit_power_mw < 0 || onchip_transfer_latency_s < 0) throw InvalidPlatform("negative platform constant");
}

const ComputeChiplet& ChipletPlatform::compute(ChipletId id) const {
  for (const auto& c : compute_chiplets)
    if (c.id == id) return c;
  throw InvalidPlatform("unknown compute chiplet " + std::to_string(id));
}

const MemoryChiplet& ChipletPlatform::memory(ChipletId id) const {
  for (const auto& m : memory_chiplets)
    if (m.id == id) return m;
  throw InvalidPlatform("unknown memory chiplet " + std::to_string(id));
}

bool ChipletPlatform::is_compute(ChipletId id) const {
  return std::any_of(compute_chiplets.begin(), compute_chiplets.end(), [id](const auto& c) { return c.id == id; });
}

bool ChipletPlatform::is_memory(ChipletId id) const {
  return std::any_of(memory_chiplets.begin(), memory_chiplets.end(), [id](const auto& m) { return m.id == id; });
}

long long ChipletPlatform::total_lanes() const {
  long long lanes = 0;
  for (const auto& c : compute_chiplets) lanes += c.lanes();
  return lanes;
}

double ChipletPlatform::total_memory_bandwidth() const {
  double bw = 0;
  for (const auto& m : memory_chiplets) bw += m.bandwidth_bytes_per_s;
  return bw;
}

ChipletPlatform make_platform(const std::vector<std::pair<int, int>>& compute, double clock_hz,
                              const std::vector<MemoryChiplet>& memory) {
  ChipletPlatform p;
  ChipletId next = 0;
  for (auto [size, count] : compute) p.compute_chiplets.push_back({next++, size, count, clock_hz});
  for (auto m : memory) {
    m.id = next++;
    p.memory_chiplets.push_back(m);
  }
  return p;
}

ChipletPlatform interposer_eval_platform() {
  std::vector<std::pair<int, int>> compute(32, {32, 32});
  return make_platform(compute, 2e9, {MemoryChiplet{0, 96e9, 16.0 * 1024 * 1024}});
}

ChipletPlatform crosslight_platform() {
  return make_platform({{9, 64}, {25, 64}, {49, 64}, {128, 64}, {9, 64}, {25, 64}, {49, 64}, {128, 64}}, 2e9,
                       {MemoryChiplet{0, 96e9, 16.0 * 1024 * 1024}});
}

}  // namespace siphsim
