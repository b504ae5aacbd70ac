#include "siphsim/sim.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <tuple>

#include "siphsim/accelerator.hpp"
#include "siphsim/errors.hpp"

namespace siphsim {

void PcmcPolicy::validate() const {
  if (!(epoch_s > 0)) throw InvalidParams("policy epoch_s must be > 0");
  if (deactivate_util_threshold < 0 || deactivate_util_threshold >= 1)
    throw InvalidParams("policy threshold must be in [0, 1)");
}

bool Event::operator>(const Event& o) const {
  auto rank = [](EventKind k) { return k == EventKind::EpochBoundary ? 0 : 1; };
  return std::tuple(time_s, rank(kind), seq) > std::tuple(o.time_s, rank(o.kind), o.seq);
}

double serialization_rate_bps(const NetworkTopology& topology, const ChipletPlatform& platform,
                              const DeviceParams& params, const ElectricalParams& electrical,
                              const TransferRequest& transfer) {
  if (platform.monolithic) {
    ChipletId mem = platform.is_memory(transfer.src) ? transfer.src : transfer.dst;
    return platform.memory(mem).bandwidth_bytes_per_s * 8.0;
  }
  double line = topology.kind.photonic() ? params.waveguide_rate_bps() : electrical.wire_rate_gbps * 1e9;
  return std::min({line, params.chiplet_bw_cap_bytes_per_s * 8.0, params.gateway_injection_bps()});
}

double analytic_latency_s(const TransferRequest& transfer, const NetworkTopology& topology,
                          const ChipletPlatform& platform, const DeviceParams& params,
                          const ElectricalParams& electrical) {
  const double bits = static_cast<double>(transfer.bytes) * 8.0;
  const double serialization = bits / serialization_rate_bps(topology, platform, params, electrical, transfer);
  if (platform.monolithic) return serialization + platform.onchip_transfer_latency_s;

  const Path& path = topology.route(transfer.src, transfer.dst);
  if (!topology.kind.photonic()) {
    double per_hop = electrical.router_cycles / params.gateway_clock_hz + topology.pitch_cm * electrical.wire_delay_s_per_cm;
    return static_cast<double>(path.hops()) * per_hop + serialization;
  }
  double setup = path.mzis.empty() ? 0.0 : params.mzi_switch_time_s;
  double propagation = path.length_cm * params.group_delay_s_per_cm;
  return setup + serialization + propagation;
}

namespace {

constexpr std::uint8_t kUnconfigured = 0xFF;

struct Route {
  std::vector<std::uint32_t> resources;
  GatewayId src_gw = 0;
  GatewayId dst_gw = 0;
  long compute_gw = -1;  // gateway under the adaptive policy, -1 if none
  const Path* path = nullptr;
  double serialization = 0.0;
  double fixed = 0.0;  // propagation, hop latency or on-chip latency
  std::uint32_t hops = 0;
};

class Engine {
 public:
  Engine(const TrafficTrace& trace, const NetworkTopology& topo, const ChipletPlatform& platform,
         const DeviceParams& params, const PcmcPolicy& policy, const ElectricalParams& elec)
      : trace_(trace), topo_(topo), platform_(platform), params_(params), policy_(policy), elec_(elec) {}

  SimResult run() {
    setup();
    if (trace_.work.empty()) {
      if (!trace_.transfers.empty()) throw UnmappedLayer("transfers without mapped work");
      return finish();
    }
    if (policy_.enabled && !platform_.monolithic) push(policy_.epoch_s, EventKind::EpochBoundary, 0);
    release_group(0);
    while (!queue_.empty()) {
      Event e = queue_.top();
      queue_.pop();
      now_ = e.time_s;
      switch (e.kind) {
        case EventKind::EpochBoundary: on_epoch(); break;
        case EventKind::InjectTransfer: try_start(e.payload); break;
        case EventKind::SwitchSetupDone: ++log_.switch_setups; break;
        case EventKind::TransferDone: on_transfer_done(e.payload); break;
        case EventKind::ComputeDone: on_compute_done(e.payload); break;
      }
    }
    if (works_left_ != 0) throw DeadlockDetected("simulation stalled with pending work");
    return finish();
  }

 private:
  void push(double t, EventKind kind, std::size_t payload) { queue_.push(Event{t, kind, seq_++, payload}); }

  std::uint32_t resource(const std::string& label) {
    auto [it, inserted] = resource_ids_.try_emplace(label, static_cast<std::uint32_t>(log_.resources.size()));
    if (inserted) log_.resources.push_back({label, 0.0});
    return it->second;
  }

  void setup() {
    const bool mono = platform_.monolithic;
    if (!mono) {
      log_.gateway_busy.resize(topo_.gateways.size());
      log_.gateway_busy_s.assign(topo_.gateways.size(), 0.0);
      for (const auto& g : topo_.gateways) log_.gateway_is_compute.push_back(g.kind == GatewayKind::Compute);
      log_.mzi_reconfigurations.assign(topo_.mzi_count, 0);
      mzi_state_.assign(topo_.mzi_count, kUnconfigured);
      if (topo_.kind.photonic())
        for (const auto& wg : topo_.waveguides) {
          const char* role = wg.role == WaveguideRole::BusRead    ? "read"
                             : wg.role == WaveguideRole::BusWrite ? "write"
                                                                  : "tree";
          resource("wg" + std::to_string(wg.id) + ":" + role + ":mem" + std::to_string(wg.memory) + ":s" +
                   std::to_string(wg.subnetwork));
        }
    }
    log_.pcmc_enabled = policy_.enabled && !mono;
    log_.epoch_s = policy_.enabled ? policy_.epoch_s : 0.0;
    if (log_.pcmc_enabled) {
      active_.assign(topo_.gateways.size(), true);
      log_.gateway_active.assign(topo_.gateways.size(), {Interval{0.0, 0.0}});
      log_.gateway_reactivations.assign(topo_.gateways.size(), 0);
    }

    routes_.resize(trace_.transfers.size());
    log_.transfers.resize(trace_.transfers.size());
    reads_left_.assign(trace_.work.size(), 0);
    writes_left_.assign(trace_.work.size(), 0);
    work_reads_.resize(trace_.work.size());
    work_writes_.resize(trace_.work.size());

    for (std::size_t i = 0; i < trace_.transfers.size(); ++i) {
      const auto& t = trace_.transfers[i];
      if (t.index != i) throw InvalidParams("transfer indices must equal their position");
      if (t.bytes == 0) throw InvalidParams("transfer of zero bytes");
      if (t.work >= trace_.work.size()) throw UnmappedLayer("transfer references unknown work");
      routes_[i] = make_route(t);
      log_.injected_bytes += t.bytes;
      if (platform_.is_memory(t.src)) {
        ++reads_left_[t.work];
        work_reads_[t.work].push_back(i);
      } else {
        ++writes_left_[t.work];
        work_writes_[t.work].push_back(i);
      }
    }
    waiters_.resize(log_.resources.size());
    holder_.assign(log_.resources.size(), kFree);

    for (std::size_t w = 0; w < trace_.work.size(); ++w) {
      const auto& mw = trace_.work[w];
      if (!platform_.is_compute(mw.chiplet)) throw UnmappedLayer("work mapped to unknown chiplet");
      group_ids_.insert(mw.group);
    }
    groups_.assign(group_ids_.begin(), group_ids_.end());
    group_works_.resize(groups_.size());
    group_left_.assign(groups_.size(), 0);
    for (std::size_t w = 0; w < trace_.work.size(); ++w) {
      std::size_t gi = static_cast<std::size_t>(
          std::lower_bound(groups_.begin(), groups_.end(), trace_.work[w].group) - groups_.begin());
      group_works_[gi].push_back(w);
      ++group_left_[gi];
    }
    works_left_ = trace_.work.size();
  }

  Route make_route(const TransferRequest& t) {
    Route r;
    const double bits = static_cast<double>(t.bytes) * 8.0;
    r.serialization = bits / serialization_rate_bps(topo_, platform_, params_, elec_, t);
    if (platform_.monolithic) {
      ChipletId mem = platform_.is_memory(t.src) ? t.src : t.dst;
      r.resources.push_back(resource("memport:" + std::to_string(mem)));
      r.fixed = platform_.onchip_transfer_latency_s;
      return r;
    }
    const Path& p = topo_.route(t.src, t.dst);
    r.path = &p;
    r.src_gw = p.src;
    r.dst_gw = p.dst;
    r.compute_gw = topo_.gateways[p.src].kind == GatewayKind::Compute ? p.src : p.dst;
    if (topo_.kind.photonic()) {
      r.resources.push_back(p.waveguide);
      r.fixed = p.length_cm * params_.group_delay_s_per_cm;
    } else {
      r.hops = static_cast<std::uint32_t>(p.hops());
      r.resources.push_back(resource("inj:r" + std::to_string(p.routers.front())));
      for (std::size_t i = 0; i + 1 < p.routers.size(); ++i)
        r.resources.push_back(
            resource("link:r" + std::to_string(p.routers[i]) + "->r" + std::to_string(p.routers[i + 1])));
      r.resources.push_back(resource("ej:r" + std::to_string(p.routers.back())));
      double per_hop = elec_.router_cycles / params_.gateway_clock_hz + topo_.pitch_cm * elec_.wire_delay_s_per_cm;
      r.fixed = static_cast<double>(r.hops) * per_hop;
    }
    return r;
  }

  void release_group(std::size_t gi) {
    for (std::size_t w : group_works_[gi]) {
      if (reads_left_[w] == 0) {
        start_compute(w);
        continue;
      }
      for (std::size_t t : work_reads_[w]) push(now_, EventKind::InjectTransfer, t);
    }
  }

  void try_start(std::size_t idx) {
    const Route& r = routes_[idx];
    for (auto res : r.resources) {
      if (holder_[res] != kFree) {
        waiters_[res].insert(idx);
        return;
      }
    }
    for (auto res : r.resources) holder_[res] = idx;

    auto& rec = log_.transfers[idx];
    rec.index = idx;
    rec.bytes = trace_.transfers[idx].bytes;
    rec.src_gateway = r.src_gw;
    rec.dst_gateway = r.dst_gw;
    rec.hops = r.hops;
    rec.start_s = now_;

    double penalty = 0.0;
    if (log_.pcmc_enabled && r.compute_gw >= 0 && !active_[r.compute_gw]) {
      penalty = params_.pcmc_switch_time_s;
      active_[r.compute_gw] = true;
      ++log_.gateway_reactivations[r.compute_gw];
      log_.gateway_active[r.compute_gw].push_back({now_, now_});
    }
    double setup = 0.0;
    if (r.path != nullptr && !r.path->mzis.empty()) {
      bool changed = false;
      for (const auto& m : r.path->mzis) {
        if (mzi_state_[m.mzi] != m.port) {
          mzi_state_[m.mzi] = m.port;
          ++log_.mzi_reconfigurations[m.mzi];
          changed = true;
        }
      }
      if (changed) setup = params_.mzi_switch_time_s;
    }
    rec.pcmc_penalty_s = penalty;
    rec.setup_s = setup;

    double duration = penalty + setup + r.serialization + r.fixed;
    rec.end_s = now_ + duration;
    if (!platform_.monolithic) {
      for (GatewayId g : {r.src_gw, r.dst_gw}) log_.gateway_busy[g].push_back({rec.start_s, rec.end_s});
    }
    if (setup > 0) push(now_ + penalty + setup, EventKind::SwitchSetupDone, idx);
    push(rec.end_s, EventKind::TransferDone, idx);
  }

  void on_transfer_done(std::size_t idx) {
    const Route& r = routes_[idx];
    const auto& t = trace_.transfers[idx];
    const auto& rec = log_.transfers[idx];
    ++log_.transfer_done_events;
    log_.delivered_bytes += t.bytes;
    log_.mesh_bit_hops += t.bytes * 8 * r.hops;
    makespan_ = std::max(makespan_, rec.end_s);

    for (auto res : r.resources) {
      holder_[res] = kFree;
      log_.resources[res].busy_s += rec.end_s - rec.start_s;
    }

    if (platform_.is_memory(t.src)) {
      if (--reads_left_[t.work] == 0) start_compute(t.work);
    } else if (--writes_left_[t.work] == 0) {
      finish_work(t.work);
    }
    wake(r.resources);
  }

  // Hands freed resources to their waiters, lowest transfer index first.
  void wake(const std::vector<std::uint32_t>& freed) {
    for (;;) {
      std::size_t best = kFree;
      std::uint32_t best_res = 0;
      for (auto res : freed) {
        if (holder_[res] != kFree || waiters_[res].empty()) continue;
        std::size_t head = *waiters_[res].begin();
        if (head < best) {
          best = head;
          best_res = res;
        }
      }
      if (best == kFree) return;
      waiters_[best_res].erase(waiters_[best_res].begin());
      try_start(best);
    }
  }

  void start_compute(std::size_t w) {
    const auto& mw = trace_.work[w];
    double& free_at = chiplet_free_[mw.chiplet];
    double start = std::max(now_, free_at);
    double latency = static_cast<double>(compute_passes(mw.dot_length, mw.dot_products, platform_.compute(mw.chiplet))) /
                     platform_.compute(mw.chiplet).clock_hz;
    free_at = start + latency;
    log_.compute.push_back({w, mw.chiplet, start, start + latency});
    push(start + latency, EventKind::ComputeDone, w);
  }

  void on_compute_done(std::size_t w) {
    makespan_ = std::max(makespan_, now_);
    if (work_writes_[w].empty()) {
      finish_work(w);
      return;
    }
    for (std::size_t t : work_writes_[w]) push(now_, EventKind::InjectTransfer, t);
  }

  void finish_work(std::size_t w) {
    --works_left_;
    std::size_t gi = static_cast<std::size_t>(
        std::lower_bound(groups_.begin(), groups_.end(), trace_.work[w].group) - groups_.begin());
    if (--group_left_[gi] == 0 && gi + 1 < groups_.size()) release_group(gi + 1);
  }

  void on_epoch() {
    const double b = now_;
    const double lo = b - policy_.epoch_s;
    for (const auto& g : topo_.gateways) {
      if (g.kind != GatewayKind::Compute || !active_[g.id]) continue;
      double busy = 0.0;
      bool in_flight = false;
      for (const auto& iv : log_.gateway_busy[g.id]) {
        busy += std::max(0.0, std::min(iv.end_s, b) - std::max(iv.start_s, lo));
        in_flight = in_flight || (iv.start_s < b && iv.end_s > b);
      }
      if (!in_flight && busy / policy_.epoch_s < policy_.deactivate_util_threshold) {
        active_[g.id] = false;
        log_.gateway_active[g.id].back().end_s = b;
      }
    }
    if (works_left_ > 0) push(b + policy_.epoch_s, EventKind::EpochBoundary, 0);
  }

  SimResult finish() {
    log_.makespan_s = makespan_;
    for (std::size_t g = 0; g < log_.gateway_busy.size(); ++g)
      for (const auto& iv : log_.gateway_busy[g]) log_.gateway_busy_s[g] += iv.end_s - iv.start_s;
    if (log_.pcmc_enabled) {
      for (std::size_t g = 0; g < log_.gateway_active.size(); ++g) {
        auto& ivs = log_.gateway_active[g];
        if (active_[g]) ivs.back().end_s = makespan_;
        for (auto& iv : ivs) {
          iv.start_s = std::min(iv.start_s, makespan_);
          iv.end_s = std::min(iv.end_s, makespan_);
        }
        std::erase_if(ivs, [](const Interval& iv) { return !(iv.end_s > iv.start_s); });
      }
    }
    return {makespan_, std::move(log_)};
  }

  static constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();

  const TrafficTrace& trace_;
  const NetworkTopology& topo_;
  const ChipletPlatform& platform_;
  const DeviceParams& params_;
  const PcmcPolicy& policy_;
  const ElectricalParams& elec_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
  double makespan_ = 0.0;
  ActivityLog log_;

  std::map<std::string, std::uint32_t> resource_ids_;
  std::vector<std::size_t> holder_;
  std::vector<std::set<std::size_t>> waiters_;
  std::vector<Route> routes_;
  std::vector<std::uint8_t> mzi_state_;
  std::vector<bool> active_;

  std::vector<std::size_t> reads_left_, writes_left_;
  std::vector<std::vector<std::size_t>> work_reads_, work_writes_;
  std::set<std::size_t> group_ids_;
  std::vector<std::size_t> groups_;
  std::vector<std::vector<std::size_t>> group_works_;
  std::vector<std::size_t> group_left_;
  std::size_t works_left_ = 0;
  std::map<ChipletId, double> chiplet_free_;
};

}  // namespace

SimResult simulate(const TrafficTrace& trace, const NetworkTopology& topology, const ChipletPlatform& platform,
                   const DeviceParams& params, const PcmcPolicy& policy, const ElectricalParams& electrical) {
  params.validate();
  electrical.validate();
  if (policy.enabled) policy.validate();
  platform.validate();
  Engine engine(trace, topology, platform, params, policy, electrical);
  return engine.run();
}

}  // namespace siphsim
