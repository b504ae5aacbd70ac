#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "gen.hpp"
#include "siphsim/errors.hpp"
#include "siphsim/topology.hpp"

using namespace siphsim;
using Catch::Matchers::WithinAbs;

TEST_CASE("stage counts for the 32-gateway platform") {
  auto platform = interposer_eval_platform();
  DeviceParams p;
  CHECK(build_topology(TopologyKind::trine(8), platform, p).stage_count == 2);
  CHECK(build_topology(TopologyKind::tree(), platform, p).stage_count == 5);
  CHECK(build_topology(TopologyKind::trine(2), gen::platform(4), p).stage_count == 1);
  CHECK(build_topology(TopologyKind::bus(), platform, p).stage_count == 0);
  CHECK(build_topology(TopologyKind::mesh(), platform, p).stage_count == 0);
}

TEST_CASE("property: stage count formula") {
  for (std::size_t g = 1; g <= 256; ++g)
    for (std::size_t k = 1; k <= g; ++k) {
      std::size_t per = (g + k - 1) / k;
      int expect = 0;
      while ((std::size_t{1} << expect) < per) ++expect;
      REQUIRE(stage_count_for(g, static_cast<int>(k)) == expect);
    }
}

TEST_CASE("invalid builds") {
  DeviceParams p;
  auto platform = gen::platform(4);
  CHECK_THROWS_AS(build_topology(TopologyKind::trine(0), platform, p), InvalidSubnetworkCount);
  CHECK_THROWS_AS(build_topology(TopologyKind::trine(5), platform, p), InvalidSubnetworkCount);
  platform.memory_chiplets.clear();
  CHECK_THROWS_AS(build_topology(TopologyKind::tree(), platform, p), InvalidPlatform);
}

TEST_CASE("inventory examples") {
  DeviceParams p;
  auto one = gen::platform(1);
  auto bus = build_topology(TopologyKind::bus(), one, p);
  CHECK(bus.device_inventory.mr_modulators == 16);
  CHECK(bus.device_inventory.mr_filters == 16);
  CHECK(bus.device_inventory.laser_sources >= 1);

  auto platform = interposer_eval_platform();
  auto tree = build_topology(TopologyKind::tree(), platform, p);
  CHECK(tree.device_inventory.mzi_switches == 31);
  CHECK(tree.device_inventory.laser_sources == 1);
  auto trine = build_topology(TopologyKind::trine(8), platform, p);
  CHECK(trine.device_inventory.mzi_switches == 24);
  CHECK(trine.device_inventory.laser_sources == 8);
  CHECK(trine.device_inventory.pcmc_couplers == 0);
  CHECK(enumerate_devices(trine, platform, p, true).pcmc_couplers ==
        static_cast<long long>(trine.gateways.size()));
  CHECK(build_topology(TopologyKind::mesh(), platform, p).device_inventory == DeviceInventory{});
}

TEST_CASE("property: Trine(1) is identical to Tree") {
  DeviceParams p;
  for (int g = 2; g <= 64; ++g) {
    auto platform = gen::platform(g);
    auto tree = build_topology(TopologyKind::tree(), platform, p);
    auto trine = build_topology(TopologyKind::trine(1), platform, p);
    REQUIRE(tree.stage_count == trine.stage_count);
    REQUIRE(tree.device_inventory == trine.device_inventory);
    REQUIRE(tree.paths == trine.paths);
    REQUIRE(tree.waveguides.size() == trine.waveguides.size());
    for (std::size_t i = 0; i < tree.waveguides.size(); ++i)
      REQUIRE(tree.waveguides[i].members == trine.waveguides[i].members);
  }
}

TEST_CASE("property: every compute gateway reaches every memory gateway of its subnetwork") {
  DeviceParams p;
  for (int trial = 0; trial < 60; ++trial) {
    int g = gen::integer(1, 40);
    auto platform = gen::platform(g);
    if (gen::integer(0, 1)) platform.memory_chiplets.push_back(MemoryChiplet{static_cast<ChipletId>(g + 1)});
    TopologyKind kinds[] = {TopologyKind::bus(), TopologyKind::tree(), TopologyKind::trine(gen::integer(1, g)),
                            TopologyKind::mesh()};
    for (const auto& kind : kinds) {
      auto t = build_topology(kind, platform, p);
      std::set<int> subnets;
      for (const auto& c : platform.compute_chiplets) {
        for (const auto& m : platform.memory_chiplets) {
          CHECK_NOTHROW(t.route(m.id, c.id));
          CHECK_NOTHROW(t.route(c.id, m.id));
          if (kind.photonic()) {
            const auto& chain = t.route(m.id, c.id).chain;
            REQUIRE_FALSE(chain.empty());
            CHECK(chain.elements().front().kind == Element::MrModulate);
            CHECK(chain.elements().back().kind == Element::MrDrop);
          }
        }
        subnets.insert(t.gateways[t.compute_gateway(c.id)].subnetwork);
      }
      if (kind.type == TopologyType::Trine) CHECK(subnets.size() == static_cast<std::size_t>(kind.subnetworks));
      if (kind.switched())
        for (const auto& [key, path] : t.paths) CHECK(path.mzis.size() <= static_cast<std::size_t>(t.stage_count));
    }
  }
}

TEST_CASE("minimal bus link") {
  DeviceParams p;
  auto t = build_topology(TopologyKind::bus(), gen::platform(1), p);
  auto worst = worst_case_path(t, p);
  double len = worst.chain.total_length_cm();
  double expect = p.mr_modulator_insertion_db + 2 * p.coupler_loss_db + len * p.waveguide_prop_loss_db_per_cm +
                  p.mr_drop_loss_db;
  CHECK_THAT(worst.loss_db, WithinAbs(expect, 1e-12));
  CHECK_THROWS_AS(worst_case_path(build_topology(TopologyKind::mesh(), gen::platform(1), p), p), NotPhotonic);
}

TEST_CASE("bus loss grows linearly with readers") {
  DeviceParams p;
  p.waveguide_prop_loss_db_per_cm = 0.0;
  std::vector<double> loss;
  for (int n = 2; n <= 8; ++n) loss.push_back(worst_case_path(build_topology(TopologyKind::bus(), gen::platform(n), p), p).loss_db);
  const double slope = p.wavelengths_per_waveguide * p.mr_through_loss_db;
  for (std::size_t i = 1; i < loss.size(); ++i) CHECK_THAT(loss[i] - loss[i - 1], WithinAbs(slope, 1e-12));
}

TEST_CASE("Tree and Trine(8) worst loss differ by three MZI stages") {
  DeviceParams p;
  auto platform = interposer_eval_platform();
  double tree = worst_case_path(build_topology(TopologyKind::tree(), platform, p), p).loss_db;
  double trine = worst_case_path(build_topology(TopologyKind::trine(8), platform, p), p).loss_db;
  CHECK_THAT(tree - trine, WithinAbs(3 * p.mzi_insertion_loss_db, 1e-9));
}

TEST_CASE("worst path is the true maximum with lowest-pair tie break") {
  DeviceParams p;
  for (int trial = 0; trial < 30; ++trial) {
    auto platform = gen::platform(gen::integer(1, 24));
    auto t = build_topology(gen::integer(0, 1) ? TopologyKind::bus() : TopologyKind::tree(), platform, p);
    auto worst = worst_case_path(t, p);
    for (const auto& [key, path] : t.paths) {
      double l = path_loss_db(path.chain, p);
      CHECK(l <= worst.loss_db);
      if (l == worst.loss_db) CHECK(std::pair{worst.src, worst.dst} <= key);
    }
  }
}

TEST_CASE("subnetwork sizing") {
  DeviceParams p;
  double sub_bw = p.wavelengths_per_waveguide * p.modulation_rate_hz / 8.0;
  CHECK(sub_bw == 12e9);
  CHECK(subnetwork_count_for_memory_bw(sub_bw, p, 32) == 1);
  CHECK(subnetwork_count_for_memory_bw(96e9, p, 32) == 8);
  CHECK(subnetwork_count_for_memory_bw(1.0, p, 32) == 1);
  CHECK(subnetwork_count_for_memory_bw(1e15, p, 32) == 32);
}

TEST_CASE("Trine has more lasers and fewer MZIs than Tree") {
  DeviceParams p;
  for (int g = 4; g <= 64; g += 4) {
    auto platform = gen::platform(g);
    auto tree = build_topology(TopologyKind::tree(), platform, p);
    for (int k = 2; k <= g / 2; k *= 2) {
      auto trine = build_topology(TopologyKind::trine(k), platform, p);
      CHECK(trine.device_inventory.laser_sources > tree.device_inventory.laser_sources);
      CHECK(trine.device_inventory.mzi_switches < tree.device_inventory.mzi_switches);
    }
  }
}

TEST_CASE("mesh routes are XY with Manhattan hop counts") {
  DeviceParams p;
  auto platform = interposer_eval_platform();
  auto t = build_topology(TopologyKind::mesh(), platform, p);
  CHECK(t.mesh_rows * t.mesh_cols >= 33);
  for (const auto& [key, path] : t.paths) {
    auto x = [&](std::uint32_t r) { return static_cast<int>(r) % t.mesh_cols; };
    auto y = [&](std::uint32_t r) { return static_cast<int>(r) / t.mesh_cols; };
    auto a = path.routers.front(), b = path.routers.back();
    CHECK(path.hops() == static_cast<std::size_t>(std::abs(x(a) - x(b)) + std::abs(y(a) - y(b))));
    bool turned = false;
    for (std::size_t i = 1; i < path.routers.size(); ++i) {
      bool vertical = x(path.routers[i]) == x(path.routers[i - 1]);
      if (vertical) turned = true;
      else CHECK_FALSE(turned);
    }
  }
}
