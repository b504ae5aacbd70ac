#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace siphsim {

/// Lumped photonic/electronic constants. Losses in dB, powers in mW, times in s.
///
/// None of the loss or power values are published for the reference designs;
/// the defaults sit inside the usual silicon-photonics literature range and
/// every field can be overridden from the `[device]` config section.
struct DeviceParams {
  double mr_through_loss_db = 0.02;
  double mr_drop_loss_db = 0.5;
  double mr_modulator_insertion_db = 0.5;
  double mzi_insertion_loss_db = 1.0;
  double waveguide_prop_loss_db_per_cm = 1.0;
  double coupler_loss_db = 1.0;
  double splitter_loss_db = 0.2;
  double pd_sensitivity_dbm = -20.0;
  double link_margin_db = 3.0;
  double laser_wall_plug_efficiency = 0.25;
  double mr_trim_power_mw = 0.5;
  double mzi_static_power_mw = 1.0;
  double mzi_switch_time_s = 10e-9;
  double modulation_rate_hz = 12e9;
  double gateway_clock_hz = 2e9;
  int wavelengths_per_waveguide = 8;
  double pcmc_switch_time_s = 500e-9;
  double pcmc_switch_energy_j = 1e-9;
  double gateway_power_mw = 50.0;
  double chiplet_bw_cap_bytes_per_s = 100e9;
  int gateway_word_bits = 64;
  double group_delay_s_per_cm = 0.1e-9;

  /// Throws InvalidParams when any invariant is violated.
  void validate() const;

  /// Line rate of one waveguide carrying every wavelength, bits/s.
  double waveguide_rate_bps() const { return wavelengths_per_waveguide * modulation_rate_hz; }
  double gateway_injection_bps() const { return gateway_clock_hz * gateway_word_bits; }
};

/// Electrical interposer (mesh) constants.
struct ElectricalParams {
  double epb_per_hop_pj = 2.0;
  int router_cycles = 3;
  double wire_rate_gbps = 40.0;
  double wire_delay_s_per_cm = 0.5e-9;

  void validate() const;
};

enum class Element : std::uint8_t { MrPass, MrDrop, MrModulate, MziStage, Propagate, Coupler, Split };

struct PathElement {
  Element kind = Element::Propagate;
  double length_cm = 0.0;  // Propagate only
  int fan_out = 0;         // Split only

  static PathElement mr_pass() { return {Element::MrPass}; }
  static PathElement mr_drop() { return {Element::MrDrop}; }
  static PathElement mr_modulate() { return {Element::MrModulate}; }
  static PathElement mzi_stage() { return {Element::MziStage}; }
  static PathElement coupler() { return {Element::Coupler}; }
  static PathElement propagate(double cm) { return {Element::Propagate, cm, 0}; }
  static PathElement split(int fan_out) { return {Element::Split, 0.0, fan_out}; }

  bool operator==(const PathElement&) const = default;
};

/// Ordered list of devices an optical signal meets between a writer and a reader.
class DeviceChain {
 public:
  DeviceChain() = default;
  explicit DeviceChain(std::vector<PathElement> elements);

  DeviceChain& push(PathElement e);
  DeviceChain& push(PathElement e, std::size_t times);
  DeviceChain& append(const DeviceChain& other);

  std::span<const PathElement> elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  std::size_t count(Element kind) const;
  double total_length_cm() const;

  bool operator==(const DeviceChain&) const = default;

 private:
  static void check(const PathElement& e);
  std::vector<PathElement> elements_;
};

DeviceChain concat(const DeviceChain& a, const DeviceChain& b);

/// Sum of the dB cost of every element in the chain.
double path_loss_db(const DeviceChain& chain, const DeviceParams& params);

/// Optical power per wavelength the laser must launch so the photodiode still
/// sees its sensitivity after `worst_loss_db` plus the link margin.
double required_laser_power_mw(double worst_loss_db, const DeviceParams& params);

double wall_plug_laser_power_mw(double optical_mw, const DeviceParams& params);

}  // namespace siphsim
