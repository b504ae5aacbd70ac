#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "siphsim/config.hpp"
#include "siphsim/power.hpp"

namespace siphsim {

/// Evaluation variants a sweep can cross with models: the four interposer
/// networks plus the monolithic single-die baseline.
const std::vector<std::string>& evaluation_topologies();

struct ReportRow {
  std::string topology;
  std::string model;
  PowerBreakdown power;
  double makespan_s = 0.0;
  std::uint64_t delivered_bits = 0;
  std::uint64_t trace_bytes = 0;
  std::uint64_t transfers = 0;
  int subnetworks = 0;
  int stage_count = 0;
  DeviceInventory inventory;
  std::optional<double> worst_loss_db;  // photonic only
  std::uint64_t reactivations = 0;

  // Ratios to the baseline row of the same model; empty when undefined.
  std::optional<double> norm_power;
  std::optional<double> norm_makespan;
  std::optional<double> norm_energy;
  std::optional<double> norm_epb;

  std::string audit;  // raw log digest written under audit/
};

struct SimReport {
  std::string baseline;
  std::vector<ReportRow> rows;  // sorted by (topology, model)

  const ReportRow& row(const std::string& topology, const std::string& model) const;
};

/// One (topology, model) cell, not normalized. `topology` is a name from
/// evaluation_topologies(); "trine" uses the configured subnetwork count when
/// the config selects Trine, otherwise the memory-bandwidth sizing.
ReportRow run_cell(const RunConfig& config, const std::string& topology, const std::string& model);

/// The configured network and model.
SimReport run(const RunConfig& config);

/// Cross product, cells evaluated concurrently. Throws ConfigError when the
/// baseline is not among `topologies`.
SimReport sweep(const RunConfig& config, const std::vector<std::string>& topologies,
                const std::vector<std::string>& models);

std::string topology_name(const TopologyKind& kind);

/// report_power.csv, report_latency.csv, report_epb.csv, summary.txt, audit/.
void write_report(const SimReport& report, const std::string& dir);

std::string power_csv(const SimReport& report);
std::string latency_csv(const SimReport& report);
std::string epb_csv(const SimReport& report);
std::string summary_text(const SimReport& report);

/// Decimal text with 9 significant digits.
std::string format_number(double v);

}  // namespace siphsim
