#include <catch_amalgamated.hpp>

#include "gen.hpp"
#include "siphsim/accelerator.hpp"
#include "siphsim/errors.hpp"

using namespace siphsim;
using Catch::Matchers::WithinRel;

namespace {

LayerSpec conv(int h, int c, int k, int cout) {
  LayerSpec l;
  l.name = "c";
  l.h = l.w = h;
  l.c = c;
  l.kh = l.kw = k;
  l.cout = cout;
  return l;
}

LayerSpec fc(int in, int out) {
  LayerSpec l;
  l.name = "fc";
  l.kind = LayerKind::FC;
  l.c = in;
  l.cout = out;
  return l;
}

}  // namespace

TEST_CASE("kernel size picks the matching chiplet") {
  auto platform = make_platform({{9, 64}, {49, 64}}, 2e9, {MemoryChiplet{}});
  auto m = map_layers({conv(16, 1, 3, 4), conv(16, 1, 7, 4)}, platform);
  CHECK(*m.chiplet[0] == 0);
  CHECK(*m.chiplet[1] == 1);
  CHECK(m.utilization[0] == 1.0);
  CHECK(m.utilization[1] == 1.0);
}

TEST_CASE("FC prefers the largest unit and ties go to the least loaded") {
  auto platform = make_platform({{9, 64}, {49, 64}, {49, 64}}, 2e9, {MemoryChiplet{}});
  auto m = map_layers({fc(100, 10), fc(100, 10), conv(8, 1, 3, 2)}, platform);
  CHECK(*m.chiplet[0] == 1);
  CHECK(*m.chiplet[1] == 2);
  CHECK(*m.chiplet[2] == 0);
}

TEST_CASE("one chiplet takes every layer") {
  auto platform = gen::platform(1, 128, 4);
  auto model = builtin_model("lenet5");
  auto m = map_layers(model, platform);
  for (const auto& c : m.chiplet) CHECK(*c == 0);
  CHECK_THROWS_AS(map_layers(model, ChipletPlatform{}), InvalidPlatform);
}

TEST_CASE("compute latency examples") {
  ComputeChiplet one{0, 9, 16, 1e9};
  LayerTraffic exact;
  exact.dot_length = 9;
  exact.dot_products = 16;
  CHECK_THAT(compute_latency_s(exact, one), WithinRel(1e-9, 1e-12));

  ComputeChiplet c25{0, 25, 64, 2e9};
  CHECK(compute_passes(25, 4704, c25) == 74);
  CHECK_THAT(compute_latency_s(conv(32, 1, 5, 6), c25), WithinRel(37e-9, 1e-12));

  LayerSpec pool = conv(28, 6, 2, 6);
  pool.kind = LayerKind::Pool;
  pool.stride = 2;
  CHECK(compute_latency_s(pool, c25) == 0.0);
}

TEST_CASE("monolithic baseline keeps the lane count") {
  auto platform = make_platform({{9, 64}, {49, 64}}, 2e9, {MemoryChiplet{}});
  auto mono = crosslight_baseline(platform);
  REQUIRE(mono.compute_chiplets.size() == 1);
  CHECK(mono.monolithic);
  CHECK(mono.compute_chiplets[0].mac_unit_size == 49);
  CHECK(mono.compute_chiplets[0].mac_unit_count == 76);
  CHECK(mono.total_lanes() >= platform.total_lanes());
  CHECK(mono.total_memory_bandwidth() == platform.total_memory_bandwidth());

  auto single = gen::platform(1);
  auto same = crosslight_baseline(single);
  CHECK(same.monolithic);
  CHECK(same.compute_chiplets[0].lanes() == single.compute_chiplets[0].lanes());

  ChipletPlatform empty;
  empty.memory_chiplets.push_back({});
  CHECK_THROWS_AS(crosslight_baseline(empty), InvalidPlatform);
}

TEST_CASE("LeNet uses a large heterogeneous platform less efficiently than VGG") {
  auto platform = crosslight_platform();
  auto lenet = builtin_model("lenet5");
  auto vgg = builtin_model("vgg16");
  double rate = 12e9;
  double u_lenet = aggregate_utilization(partition_layers(lenet, platform, rate), platform);
  double u_vgg = aggregate_utilization(partition_layers(vgg, platform, rate), platform);
  CHECK(u_lenet < u_vgg);
  CHECK(u_lenet > 0.0);
  CHECK(u_vgg <= 1.0);
}

TEST_CASE("property: mapping is total and utilization lies in (0,1]") {
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<int, int>> units;
    int n = gen::integer(1, 8);
    for (int i = 0; i < n; ++i) units.emplace_back(gen::integer(1, 130), gen::integer(1, 64));
    auto platform = make_platform(units, 2e9, {MemoryChiplet{}});
    std::vector<LayerSpec> model;
    int layers = gen::integer(1, 10);
    for (int i = 0; i < layers; ++i) {
      if (gen::integer(0, 3) == 0) model.push_back(fc(gen::integer(1, 500), gen::integer(1, 100)));
      else {
        int k = gen::integer(1, 7);
        model.push_back(conv(gen::integer(k, 32), gen::integer(1, 32), k, gen::integer(1, 64)));
      }
    }
    auto m = map_layers(model, platform);
    REQUIRE(m.size() == model.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      REQUIRE(m.chiplet[i].has_value());
      CHECK(platform.is_compute(*m.chiplet[i]));
      CHECK(m.utilization[i] > 0.0);
      CHECK(m.utilization[i] <= 1.0);
      auto t = layer_traffic(model[i]);
      auto s = static_cast<std::uint64_t>(platform.compute(*m.chiplet[i]).mac_unit_size);
      if (t.dot_length == s) CHECK(m.utilization[i] == 1.0);
      // no other chiplet wastes fewer lanes on a conv
      if (model[i].kind == LayerKind::Conv) {
        auto waste = [&](std::uint64_t size) { return (t.dot_length + size - 1) / size * size - t.dot_length; };
        for (const auto& c : platform.compute_chiplets)
          CHECK(waste(s) <= waste(static_cast<std::uint64_t>(c.mac_unit_size)));
      }
    }
    CHECK_NOTHROW(plan_from_mapping(model, m));
  }
}

TEST_CASE("property: compute passes match the per-dot re-derivation") {
  for (int trial = 0; trial < 1000; ++trial) {
    std::uint64_t len = static_cast<std::uint64_t>(gen::integer(1, 5000));
    std::uint64_t dots = static_cast<std::uint64_t>(gen::integer(1, 100000));
    ComputeChiplet c{0, gen::integer(1, 130), gen::integer(1, 128), 2e9};
    std::uint64_t per_dot = 0;
    for (std::uint64_t done = 0; done < len; done += static_cast<std::uint64_t>(c.mac_unit_size)) ++per_dot;
    std::uint64_t rounds = 0;
    for (std::uint64_t done = 0; done < dots; done += static_cast<std::uint64_t>(c.mac_unit_count)) ++rounds;
    CHECK(compute_passes(len, dots, c) == per_dot * rounds);
    CHECK(compute_passes(len, dots, c) * c.lanes() >= len * dots);
  }
}

TEST_CASE("partition uses every chiplet on large layers") {
  auto platform = interposer_eval_platform();
  auto model = builtin_model("vgg16");
  auto plan = partition_layers(model, platform, 100e9);
  std::vector<int> per_layer(model.size(), 0);
  for (const auto& s : plan.slices) ++per_layer[s.layer];
  CHECK(per_layer[1] == static_cast<int>(platform.compute_chiplets.size()));
  for (std::size_t i = 0; i < model.size(); ++i) CHECK(per_layer[i] >= 1);
}
