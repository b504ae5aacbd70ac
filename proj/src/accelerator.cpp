#include "siphsim/accelerator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "siphsim/errors.hpp"

namespace siphsim {

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

std::uint64_t to_bytes(std::uint64_t elems, int bit_width) {
  return (elems * static_cast<std::uint64_t>(bit_width) + 7) / 8;
}

}  // namespace

std::uint64_t compute_passes(std::uint64_t dot_length, std::uint64_t dot_products, const ComputeChiplet& chiplet) {
  if (dot_length == 0 || dot_products == 0) return 0;
  return ceil_div(dot_length, static_cast<std::uint64_t>(chiplet.mac_unit_size)) *
         ceil_div(dot_products, static_cast<std::uint64_t>(chiplet.mac_unit_count));
}

double compute_latency_s(const LayerTraffic& t, const ComputeChiplet& chiplet) {
  return static_cast<double>(compute_passes(t.dot_length, t.dot_products, chiplet)) / chiplet.clock_hz;
}

double compute_latency_s(const LayerSpec& layer, const ComputeChiplet& chiplet) {
  return compute_latency_s(layer_traffic(layer), chiplet);
}

double lane_utilization(std::uint64_t dot_length, int mac_unit_size) {
  if (dot_length == 0) return 1.0;
  const auto s = static_cast<std::uint64_t>(mac_unit_size);
  return static_cast<double>(dot_length) / static_cast<double>(ceil_div(dot_length, s) * s);
}

LayerMapping map_layers(const std::vector<LayerSpec>& model, const ChipletPlatform& platform) {
  if (platform.compute_chiplets.empty()) throw InvalidPlatform("platform has no compute chiplet");
  const auto& chiplets = platform.compute_chiplets;
  std::vector<std::uint64_t> load(chiplets.size(), 0);

  LayerMapping m;
  for (const auto& layer : model) {
    LayerTraffic t = layer_traffic(layer);
    // Lower key wins: (primary score, accumulated MACs, id).
    auto key = [&](std::size_t i) {
      const auto s = static_cast<std::uint64_t>(chiplets[i].mac_unit_size);
      std::uint64_t primary = 0;
      if (layer.kind == LayerKind::FC) primary = ~s;  // prefer the largest unit
      else if (t.dot_length > 0) primary = ceil_div(t.dot_length, s) * s - t.dot_length;
      return std::tuple{primary, load[i], chiplets[i].id};
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < chiplets.size(); ++i)
      if (key(i) < key(best)) best = i;
    load[best] += t.mac_count;
    m.chiplet.emplace_back(chiplets[best].id);
    m.utilization.push_back(lane_utilization(t.dot_length, chiplets[best].mac_unit_size));
  }
  return m;
}

ExecutionPlan plan_from_mapping(const std::vector<LayerSpec>& model, const LayerMapping& mapping) {
  ExecutionPlan plan;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (i >= mapping.chiplet.size() || !mapping.chiplet[i])
      throw UnmappedLayer("layer '" + model[i].name + "' is not mapped to a chiplet");
    plan.slices.push_back({i, *mapping.chiplet[i], layer_traffic(model[i])});
  }
  return plan;
}

TrafficTrace build_trace(const std::vector<LayerSpec>& model, const LayerMapping& mapping,
                         const ChipletPlatform& platform, std::uint64_t packet_bytes) {
  return build_trace(plan_from_mapping(model, mapping), platform, packet_bytes);
}

namespace {

enum class SplitAxis { OutChannels, Channels };

struct SplitShape {
  SplitAxis axis;
  std::uint64_t units;
  std::uint64_t unit_bytes;         // bytes that scale with the unit count
  std::uint64_t unit_dot_products;  // dot products per unit
};

SplitShape split_shape(const LayerSpec& l) {
  using u64 = std::uint64_t;
  const u64 oh = static_cast<u64>(l.out_h()), ow = static_cast<u64>(l.out_w());
  const u64 h = l.h, w = l.w, c = l.c, kk = static_cast<u64>(l.kh) * l.kw, cout = l.cout;
  switch (l.kind) {
    case LayerKind::FC:
      return {SplitAxis::OutChannels, cout, h * w * c + 2, 1};
    case LayerKind::Conv:  // cut on a grid by partition_conv
      break;
    case LayerKind::DepthwiseConv:
      return {SplitAxis::Channels, c, kk + 1 + h * w + oh * ow, oh * ow};
    case LayerKind::Pool:
      return {SplitAxis::Channels, c, h * w + oh * ow, 0};
  }
  return {SplitAxis::Channels, 1, 0, 0};
}

LayerTraffic slice_traffic(const LayerSpec& l, const LayerTraffic& full, SplitAxis axis, std::uint64_t n) {
  using u64 = std::uint64_t;
  const u64 oh = static_cast<u64>(l.out_h()), ow = static_cast<u64>(l.out_w());
  const u64 h = l.h, w = l.w, c = l.c, kk = static_cast<u64>(l.kh) * l.kw;
  LayerTraffic t;
  t.dot_length = full.dot_length;
  switch (axis) {
    case SplitAxis::OutChannels:  // fully connected
      t.input_bytes = full.input_bytes;
      t.weight_bytes = to_bytes(h * w * c * n + n, l.bit_width);
      t.output_bytes = to_bytes(n, l.bit_width);
      t.dot_products = n;
      break;
    case SplitAxis::Channels: {
      t.weight_bytes = l.kind == LayerKind::Pool ? 0 : to_bytes(kk * n + n, l.bit_width);
      t.input_bytes = to_bytes(h * w * n, l.bit_width);
      t.output_bytes = to_bytes(oh * ow * n, l.bit_width);
      t.dot_products = l.kind == LayerKind::Pool ? 0 : oh * ow * n;
      break;
    }
  }
  t.mac_count = t.dot_length * t.dot_products;
  return t;
}

}  // namespace

namespace {

// Largest-remainder apportionment of `total` by `weights`; remainder ties go
// to the lower index.
std::vector<std::uint64_t> apportion(std::uint64_t total, const std::vector<double>& weights) {
  double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::uint64_t> out(weights.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double exact = static_cast<double>(total) * weights[i] / sum;
    out[i] = static_cast<std::uint64_t>(std::floor(exact));
    assigned += out[i];
    rem.emplace_back(-(exact - std::floor(exact)), i);
  }
  std::sort(rem.begin(), rem.end());
  for (std::size_t r = 0; assigned < total; ++r, ++assigned) ++out[rem[r % rem.size()].second];
  return out;
}

double passes_per_dot(std::uint64_t dot_length, const ComputeChiplet& ch) {
  return std::ceil(static_cast<double>(dot_length) / ch.mac_unit_size);
}

LayerTraffic conv_slice(const LayerSpec& l, const LayerTraffic& full, std::uint64_t rows, std::uint64_t chans) {
  using u64 = std::uint64_t;
  const u64 ow = static_cast<u64>(l.out_w()), w = l.w, c = l.c, kk = static_cast<u64>(l.kh) * l.kw;
  LayerTraffic t;
  u64 in_rows = std::min<u64>(l.h, (rows - 1) * static_cast<u64>(l.stride) + static_cast<u64>(l.kh));
  t.dot_length = full.dot_length;
  t.weight_bytes = to_bytes(kk * c * chans + chans, l.bit_width);
  t.input_bytes = to_bytes(in_rows * w * c, l.bit_width);
  t.output_bytes = to_bytes(rows * ow * chans, l.bit_width);
  t.dot_products = rows * ow * chans;
  t.mac_count = t.dot_length * t.dot_products;
  return t;
}

double slice_time(const LayerTraffic& t, const ComputeChiplet& ch, double link) {
  double bytes = static_cast<double>(t.weight_bytes + t.input_bytes + t.output_bytes);
  return bytes / link + static_cast<double>(compute_passes(t.dot_length, t.dot_products, ch)) / ch.clock_hz;
}

// Conv layers are cut on a grid: chiplets form `groups` teams, each team
// owns a share of the output channels and splits the output rows among its
// members. The team count with the shortest slowest slice wins.
std::vector<std::pair<std::size_t, LayerTraffic>> partition_conv(const LayerSpec& l, const LayerTraffic& full,
                                                                  const std::vector<ComputeChiplet>& chiplets,
                                                                  double link) {
  const std::uint64_t oh = static_cast<std::uint64_t>(l.out_h()), ow = static_cast<std::uint64_t>(l.out_w());
  const std::size_t n = chiplets.size();
  std::vector<double> speed(n);
  for (std::size_t i = 0; i < n; ++i)
    speed[i] = chiplets[i].mac_unit_count * chiplets[i].clock_hz / passes_per_dot(full.dot_length, chiplets[i]);
  std::vector<std::size_t> by_speed(n);
  std::iota(by_speed.begin(), by_speed.end(), 0);
  std::stable_sort(by_speed.begin(), by_speed.end(), [&](auto a, auto b) { return speed[a] > speed[b]; });

  std::vector<std::pair<std::size_t, LayerTraffic>> best;
  double best_time = std::numeric_limits<double>::infinity();
  const std::size_t max_groups = std::min<std::size_t>(n, static_cast<std::size_t>(l.cout));
  for (std::size_t groups = 1; groups <= max_groups; ++groups) {
    std::vector<std::vector<std::size_t>> team(groups);
    std::vector<double> team_speed(groups, 0.0);
    for (std::size_t i : by_speed) {
      std::size_t g = static_cast<std::size_t>(
          std::min_element(team_speed.begin(), team_speed.end()) - team_speed.begin());
      team[g].push_back(i);
      team_speed[g] += speed[i];
    }
    for (auto& team_members : team) std::sort(team_members.begin(), team_members.end());

    // Channel shares start proportional to compute speed, then follow the
    // measured throughput of each team for a few rounds.
    std::vector<double> share = team_speed;
    for (int round = 0; round < 8; ++round) {
      std::vector<std::uint64_t> chans = apportion(static_cast<std::uint64_t>(l.cout), share);
      std::vector<std::pair<std::size_t, LayerTraffic>> cut;
      std::vector<double> team_time(groups, 0.0);
      for (std::size_t g = 0; g < groups; ++g) {
        if (chans[g] == 0) continue;
        std::vector<double> row_rate;
        for (std::size_t i : team[g]) {
          const auto& ch = chiplets[i];
          double net = static_cast<double>(static_cast<std::uint64_t>(l.stride) * l.w * l.c + ow * chans[g]) / link;
          double comp = static_cast<double>(ow * chans[g]) * passes_per_dot(full.dot_length, ch) /
                        (ch.mac_unit_count * ch.clock_hz);
          row_rate.push_back(1.0 / (net + comp));
        }
        std::vector<std::uint64_t> rows = apportion(oh, row_rate);
        for (std::size_t m = 0; m < team[g].size(); ++m) {
          if (rows[m] == 0) continue;
          LayerTraffic t = conv_slice(l, full, rows[m], chans[g]);
          team_time[g] = std::max(team_time[g], slice_time(t, chiplets[team[g][m]], link));
          cut.emplace_back(team[g][m], t);
        }
      }
      double worst = *std::max_element(team_time.begin(), team_time.end());
      if (worst < best_time) {
        best_time = worst;
        best = std::move(cut);
      }
      for (std::size_t g = 0; g < groups; ++g)
        share[g] = chans[g] > 0 ? static_cast<double>(chans[g]) / team_time[g] : 0.5 * share[g];
    }
  }
  std::sort(best.begin(), best.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return best;
}

}  // namespace

ExecutionPlan partition_layers(const std::vector<LayerSpec>& model, const ChipletPlatform& platform,
                               double link_rate_bytes_per_s) {
  if (platform.compute_chiplets.empty()) throw InvalidPlatform("platform has no compute chiplet");
  if (!(link_rate_bytes_per_s > 0)) throw InvalidParams("link rate must be > 0");
  const auto& chiplets = platform.compute_chiplets;
  // A chiplet never sees more than its share of the memory bandwidth.
  double link = link_rate_bytes_per_s;
  if (!platform.memory_chiplets.empty())
    link = std::min(link, platform.total_memory_bandwidth() / static_cast<double>(chiplets.size()));

  ExecutionPlan plan;
  for (std::size_t li = 0; li < model.size(); ++li) {
    const LayerSpec& l = model[li];
    LayerTraffic full = layer_traffic(l);
    if (chiplets.size() == 1) {
      plan.slices.push_back({li, chiplets.front().id, full});
      continue;
    }
    if (l.kind == LayerKind::Conv) {
      for (auto& [i, t] : partition_conv(l, full, chiplets, link)) plan.slices.push_back({li, chiplets[i].id, t});
      continue;
    }
    SplitShape shape = split_shape(l);
    if (shape.units <= 1) {
      plan.slices.push_back({li, chiplets.front().id, full});
      continue;
    }
    // Share of units for chiplet i is proportional to 1 / (time per unit on i).
    std::vector<double> rate(chiplets.size());
    for (std::size_t i = 0; i < chiplets.size(); ++i) {
      const auto& ch = chiplets[i];
      double net = static_cast<double>(shape.unit_bytes) / link;
      double comp = 0.0;
      if (full.dot_length > 0)
        comp = static_cast<double>(shape.unit_dot_products) * passes_per_dot(full.dot_length, ch) /
               (ch.mac_unit_count * ch.clock_hz);
      rate[i] = 1.0 / (net + comp);
    }
    std::vector<std::uint64_t> units = apportion(shape.units, rate);
    for (std::size_t i = 0; i < chiplets.size(); ++i)
      if (units[i] > 0) plan.slices.push_back({li, chiplets[i].id, slice_traffic(l, full, shape.axis, units[i])});
  }
  return plan;
}

double aggregate_utilization(const ExecutionPlan& plan, const ChipletPlatform& platform) {
  // Each layer holds the whole platform until its slowest slice finishes.
  double capacity_per_s = 0.0;
  for (const auto& c : platform.compute_chiplets) capacity_per_s += static_cast<double>(c.lanes()) * c.clock_hz;
  std::map<std::size_t, double> layer_time;
  double used = 0.0;
  for (const auto& s : plan.slices) {
    double& t = layer_time[s.layer];
    t = std::max(t, compute_latency_s(s.traffic, platform.compute(s.chiplet)));
    used += static_cast<double>(s.traffic.mac_count);
  }
  double provisioned = 0.0;
  for (const auto& [layer, t] : layer_time) provisioned += t * capacity_per_s;
  return provisioned > 0 ? used / provisioned : 0.0;
}

double aggregate_utilization(const std::vector<LayerSpec>& model, const LayerMapping& mapping,
                             const ChipletPlatform& platform) {
  return aggregate_utilization(plan_from_mapping(model, mapping), platform);
}

ChipletPlatform crosslight_baseline(const ChipletPlatform& platform) {
  if (platform.compute_chiplets.empty()) throw InvalidPlatform("platform has no compute chiplet");
  ChipletPlatform mono = platform;
  mono.monolithic = true;
  if (platform.compute_chiplets.size() == 1) return mono;

  auto largest = std::max_element(platform.compute_chiplets.begin(), platform.compute_chiplets.end(),
                                  [](const auto& a, const auto& b) { return a.mac_unit_size < b.mac_unit_size; });
  const long long size = largest->mac_unit_size;
  const long long units = (platform.total_lanes() + size - 1) / size;
  mono.compute_chiplets = {ComputeChiplet{platform.compute_chiplets.front().id, static_cast<int>(size),
                                          static_cast<int>(units), largest->clock_hz}};
  return mono;
}

}  // namespace siphsim
