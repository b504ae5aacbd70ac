#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "siphsim/device.hpp"
#include "siphsim/platform.hpp"

namespace siphsim {

enum class TopologyType : std::uint8_t { Bus, Tree, Trine, ElectricalMesh };

struct TopologyKind {
  TopologyType type = TopologyType::Tree;
  int subnetworks = 1;  // Trine only; Tree is always 1
  int mesh_rows = 0;    // 0 = choose the smallest near-square grid
  int mesh_cols = 0;

  static TopologyKind bus() { return {TopologyType::Bus, 1, 0, 0}; }
  static TopologyKind tree() { return {TopologyType::Tree, 1, 0, 0}; }
  static TopologyKind trine(int k) { return {TopologyType::Trine, k, 0, 0}; }
  static TopologyKind mesh(int rows = 0, int cols = 0) { return {TopologyType::ElectricalMesh, 1, rows, cols}; }

  bool photonic() const { return type != TopologyType::ElectricalMesh; }
  bool switched() const { return type == TopologyType::Tree || type == TopologyType::Trine; }
  std::string name() const;
};

using GatewayId = std::uint32_t;
enum class GatewayKind : std::uint8_t { Compute, Memory };

struct Position {
  double x_cm = 0.0;
  double y_cm = 0.0;
};

double manhattan_cm(Position a, Position b);

struct GatewayNode {
  GatewayId id = 0;
  ChipletId chiplet = 0;
  GatewayKind kind = GatewayKind::Compute;
  Position pos;
  int subnetwork = 0;
};

enum class WaveguideRole : std::uint8_t { Switched, BusRead, BusWrite };

struct Waveguide {
  std::uint32_t id = 0;
  int subnetwork = 0;
  ChipletId memory = 0;
  WaveguideRole role = WaveguideRole::Switched;
  std::vector<GatewayId> members;  // compute gateways in waveguide order
};

/// MZI switch and the output port a path needs it set to.
struct MziSetting {
  std::uint32_t mzi = 0;
  std::uint8_t port = 0;
  bool operator==(const MziSetting&) const = default;
};

struct Path {
  GatewayId src = 0;
  GatewayId dst = 0;
  DeviceChain chain;                   // photonic kinds
  std::uint32_t waveguide = 0;         // photonic kinds
  std::vector<MziSetting> mzis;        // switched kinds, root first
  std::vector<GatewayId> tapped;       // gateways whose MR sets the signal passes (bus)
  std::vector<std::uint32_t> routers;  // mesh: XY route, source router first
  double length_cm = 0.0;

  std::size_t hops() const { return routers.empty() ? 0 : routers.size() - 1; }
  bool operator==(const Path&) const = default;
};

struct DeviceInventory {
  long long mr_modulators = 0;
  long long mr_filters = 0;
  long long mzi_switches = 0;
  long long pcmc_couplers = 0;
  long long laser_sources = 0;

  long long mrs() const { return mr_modulators + mr_filters; }
  bool operator==(const DeviceInventory&) const = default;
};

struct NetworkTopology {
  TopologyKind kind;
  std::vector<GatewayNode> gateways;  // compute gateways first, in chiplet order
  std::vector<Waveguide> waveguides;
  std::map<std::pair<GatewayId, GatewayId>, Path> paths;
  int stage_count = 0;
  std::uint32_t mzi_count = 0;
  int mesh_rows = 0;
  int mesh_cols = 0;
  double pitch_cm = 1.0;
  DeviceInventory device_inventory;

  std::size_t compute_gateway_count() const;
  GatewayId compute_gateway(ChipletId chiplet) const;
  /// Memory-side gateway serving `compute_chiplet`'s subnetwork.
  GatewayId memory_gateway(ChipletId memory, ChipletId compute_chiplet) const;
  const Path& route(ChipletId src, ChipletId dst) const;
};

/// Throws InvalidPlatform or InvalidSubnetworkCount.
NetworkTopology build_topology(const TopologyKind& kind, const ChipletPlatform& platform, const DeviceParams& params);

struct WorstPath {
  GatewayId src = 0;
  GatewayId dst = 0;
  DeviceChain chain;
  double loss_db = 0.0;
};

/// Highest-loss path; ties go to the lowest (src, dst). Throws NotPhotonic.
WorstPath worst_case_path(const NetworkTopology& topology, const DeviceParams& params);

/// ceil(log2(ceil(compute / subnetworks))).
int stage_count_for(std::size_t compute_gateways, int subnetworks);

/// Subnetworks needed to carry `memory_bw` at one waveguide per subnetwork,
/// clamped to [1, compute_gateways].
int subnetwork_count_for_memory_bw(double memory_bw_bytes_per_s, const DeviceParams& params,
                                   std::size_t compute_gateways);

DeviceInventory enumerate_devices(const NetworkTopology& topology, const ChipletPlatform& platform,
                                  const DeviceParams& params, bool adaptive = false);

}  // namespace siphsim
