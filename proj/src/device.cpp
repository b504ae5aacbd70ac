#include "siphsim/device.hpp"

#include <cmath>
#include <string>

#include "siphsim/errors.hpp"

namespace siphsim {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidParams(std::string("invalid device parameter: ") + what);
}

}  // namespace

void DeviceParams::validate() const {
  require(mr_through_loss_db >= 0, "mr_through_loss_db < 0");
  require(mr_drop_loss_db >= 0, "mr_drop_loss_db < 0");
  require(mr_modulator_insertion_db >= 0, "mr_modulator_insertion_db < 0");
  require(mzi_insertion_loss_db >= 0, "mzi_insertion_loss_db < 0");
  require(waveguide_prop_loss_db_per_cm >= 0, "waveguide_prop_loss_db_per_cm < 0");
  require(coupler_loss_db >= 0, "coupler_loss_db < 0");
  require(splitter_loss_db >= 0, "splitter_loss_db < 0");
  require(link_margin_db >= 0, "link_margin_db < 0");
  require(pd_sensitivity_dbm < 10, "pd_sensitivity_dbm >= 10");
  require(laser_wall_plug_efficiency > 0 && laser_wall_plug_efficiency <= 1,
          "laser_wall_plug_efficiency outside (0,1]");
  require(mr_trim_power_mw >= 0, "mr_trim_power_mw < 0");
  require(mzi_static_power_mw >= 0, "mzi_static_power_mw < 0");
  require(gateway_power_mw >= 0, "gateway_power_mw < 0");
  require(mzi_switch_time_s >= 0, "mzi_switch_time_s < 0");
  require(pcmc_switch_time_s >= 0, "pcmc_switch_time_s < 0");
  require(pcmc_switch_energy_j >= 0, "pcmc_switch_energy_j < 0");
  require(modulation_rate_hz > 0, "modulation_rate_hz <= 0");
  require(gateway_clock_hz > 0, "gateway_clock_hz <= 0");
  require(wavelengths_per_waveguide >= 1, "wavelengths_per_waveguide < 1");
  require(chiplet_bw_cap_bytes_per_s > 0, "chiplet_bw_cap_bytes_per_s <= 0");
  require(gateway_word_bits >= 1, "gateway_word_bits < 1");
  require(group_delay_s_per_cm >= 0, "group_delay_s_per_cm < 0");
}

void ElectricalParams::validate() const {
  require(epb_per_hop_pj >= 0, "epb_per_hop_pj < 0");
  require(router_cycles >= 0, "router_cycles < 0");
  require(wire_rate_gbps > 0, "wire_rate_gbps <= 0");
  require(wire_delay_s_per_cm >= 0, "wire_delay_s_per_cm < 0");
}

DeviceChain::DeviceChain(std::vector<PathElement> elements) : elements_(std::move(elements)) {
  for (const auto& e : elements_) check(e);
}

void DeviceChain::check(const PathElement& e) {
  if (e.kind == Element::Propagate && !(e.length_cm >= 0))
    throw InvalidParams("Propagate length must be >= 0");
  if (e.kind == Element::Split && e.fan_out < 2) throw InvalidParams("Split fan_out must be >= 2");
}

DeviceChain& DeviceChain::push(PathElement e) {
  check(e);
  elements_.push_back(e);
  return *this;
}

DeviceChain& DeviceChain::push(PathElement e, std::size_t times) {
  check(e);
  elements_.insert(elements_.end(), times, e);
  return *this;
}

DeviceChain& DeviceChain::append(const DeviceChain& other) {
  elements_.insert(elements_.end(), other.elements_.begin(), other.elements_.end());
  return *this;
}

std::size_t DeviceChain::count(Element kind) const {
  std::size_t n = 0;
  for (const auto& e : elements_) n += e.kind == kind;
  return n;
}

double DeviceChain::total_length_cm() const {
  double cm = 0.0;
  for (const auto& e : elements_)
    if (e.kind == Element::Propagate) cm += e.length_cm;
  return cm;
}

DeviceChain concat(const DeviceChain& a, const DeviceChain& b) {
  DeviceChain out = a;
  out.append(b);
  return out;
}

double path_loss_db(const DeviceChain& chain, const DeviceParams& p) {
  // Element counts first so the result does not depend on chain order.
  double split_db = 0.0;
  for (const auto& e : chain.elements())
    if (e.kind == Element::Split) split_db += 10.0 * std::log10(static_cast<double>(e.fan_out)) + p.splitter_loss_db;

  return static_cast<double>(chain.count(Element::MrPass)) * p.mr_through_loss_db +
         static_cast<double>(chain.count(Element::MrDrop)) * p.mr_drop_loss_db +
         static_cast<double>(chain.count(Element::MrModulate)) * p.mr_modulator_insertion_db +
         static_cast<double>(chain.count(Element::MziStage)) * p.mzi_insertion_loss_db +
         static_cast<double>(chain.count(Element::Coupler)) * p.coupler_loss_db +
         chain.total_length_cm() * p.waveguide_prop_loss_db_per_cm + split_db;
}

double required_laser_power_mw(double worst_loss_db, const DeviceParams& p) {
  return std::pow(10.0, (p.pd_sensitivity_dbm + worst_loss_db + p.link_margin_db) / 10.0);
}

double wall_plug_laser_power_mw(double optical_mw, const DeviceParams& p) {
  return optical_mw / p.laser_wall_plug_efficiency;
}

}  // namespace siphsim
