#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "siphsim/platform.hpp"
#include "siphsim/workload.hpp"

namespace siphsim {

/// Layer index -> compute chiplet, with the lane utilization the choice gives.
struct LayerMapping {
  std::vector<std::optional<ChipletId>> chiplet;
  std::vector<double> utilization;

  std::size_t size() const { return chiplet.size(); }
};

/// Passes needed on `chiplet`: each unit covers up to mac_unit_size terms of
/// one dot product per clock.
std::uint64_t compute_passes(std::uint64_t dot_length, std::uint64_t dot_products, const ComputeChiplet& chiplet);
double compute_latency_s(const LayerTraffic& traffic, const ComputeChiplet& chiplet);
double compute_latency_s(const LayerSpec& layer, const ComputeChiplet& chiplet);

/// Used lanes per pass over provisioned lanes for one dot product.
double lane_utilization(std::uint64_t dot_length, int mac_unit_size);

/// Whole-layer mapping: Conv layers go to the chiplet wasting the fewest lanes
/// per pass, FC layers to the largest unit size; ties by accumulated MACs, then id.
LayerMapping map_layers(const std::vector<LayerSpec>& model, const ChipletPlatform& platform);

/// One slice per layer following `mapping`. Throws UnmappedLayer.
ExecutionPlan plan_from_mapping(const std::vector<LayerSpec>& model, const LayerMapping& mapping);

TrafficTrace build_trace(const std::vector<LayerSpec>& model, const LayerMapping& mapping,
                         const ChipletPlatform& platform, std::uint64_t packet_bytes = kDefaultPacketBytes);

/// Splits every layer across the compute chiplets in proportion to how fast
/// each finishes one unit of work (transfer plus compute). Conv layers are cut
/// on a grid of output-channel teams x output rows, whichever grid shape gives
/// the shortest slowest slice; other kinds are cut along channels. The link
/// rate is capped at each chiplet's share of the memory bandwidth.
ExecutionPlan partition_layers(const std::vector<LayerSpec>& model, const ChipletPlatform& platform,
                               double link_rate_bytes_per_s);

/// Fraction of the platform's lane-cycles doing MACs, charging every layer the
/// whole platform for as long as its slowest slice computes.
double aggregate_utilization(const ExecutionPlan& plan, const ChipletPlatform& platform);
double aggregate_utilization(const std::vector<LayerSpec>& model, const LayerMapping& mapping,
                             const ChipletPlatform& platform);

/// Monolithic platform with at least the same lane count, built from units of
/// the largest size and attached to the same memory.
ChipletPlatform crosslight_baseline(const ChipletPlatform& platform);

}  // namespace siphsim
