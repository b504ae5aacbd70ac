#pragma once

#include <cstdint>
#include <istream>
#include <string>

#include "siphsim/device.hpp"
#include "siphsim/platform.hpp"
#include "siphsim/sim.hpp"
#include "siphsim/topology.hpp"
#include "siphsim/workload.hpp"

namespace siphsim {

enum class MappingMode : std::uint8_t {
  Partitioned,  // every layer split across all compute chiplets
  PerLayer,     // map_layers: one chiplet per layer
};

struct WorkloadConfig {
  std::string model = "lenet5";
  std::string model_file;  // overrides `model` when set
  int bit_width = 0;       // 0 keeps the per-layer widths of the model
  std::uint64_t packet_bytes = kDefaultPacketBytes;
  MappingMode mapping = MappingMode::Partitioned;
};

struct RunConfig {
  DeviceParams device;
  ElectricalParams electrical;
  PcmcPolicy policy;
  TopologyKind network = TopologyKind::tree();
  std::string platform_name = "interposer";
  ChipletPlatform platform = interposer_eval_platform();
  WorkloadConfig workload;
  std::string baseline;  // empty: bus if present, else the first topology
  std::string out_dir = "siphsim_out";

  void validate() const;
};

/// Parses the INI-style config. `[network]` is mandatory; unknown sections
/// and keys are rejected with their line number.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Defaults used when no file is given: interposer platform, Trine sized to
/// the memory bandwidth.
RunConfig default_config();

std::string to_string(MappingMode mode);

}  // namespace siphsim
