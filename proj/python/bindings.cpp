#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "siphsim/config.hpp"
#include "siphsim/errors.hpp"
#include "siphsim/power.hpp"
#include "siphsim/report.hpp"
#include "siphsim/topology.hpp"

namespace py = pybind11;
using namespace siphsim;

namespace {

py::dict row_dict(const ReportRow& r) {
  py::dict d;
  d["topology"] = r.topology;
  d["model"] = r.model;
  d["laser_mw"] = r.power.laser_mw;
  d["trimming_mw"] = r.power.trimming_mw;
  d["mzi_static_mw"] = r.power.mzi_static_mw;
  d["gateway_mw"] = r.power.gateway_mw;
  d["mac_mw"] = r.power.mac_mw;
  d["electrical_mw"] = r.power.electrical_mw;
  d["total_mw"] = r.power.total_mw;
  d["energy_j"] = r.power.energy_j;
  d["epb_pj_per_bit"] = r.power.epb_pj_per_bit;
  d["makespan_s"] = r.makespan_s;
  d["delivered_bits"] = r.delivered_bits;
  d["transfers"] = r.transfers;
  d["subnetworks"] = r.subnetworks;
  d["stage_count"] = r.stage_count;
  d["worst_loss_db"] = r.worst_loss_db;
  d["reactivations"] = r.reactivations;
  d["norm_power"] = r.norm_power;
  d["norm_makespan"] = r.norm_makespan;
  d["norm_energy"] = r.norm_energy;
  d["norm_epb"] = r.norm_epb;
  return d;
}

py::list rows(const SimReport& report) {
  py::list out;
  for (const auto& r : report.rows) out.append(row_dict(r));
  return out;
}

TopologyKind kind_from_name(const std::string& name, int subnetworks) {
  if (name == "bus") return TopologyKind::bus();
  if (name == "tree") return TopologyKind::tree();
  if (name == "trine") return TopologyKind::trine(subnetworks);
  if (name == "mesh") return TopologyKind::mesh();
  throw ConfigError("unknown topology '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_siphsim, m) {
  m.doc() = "Chiplet interposer network simulator";

  // Translators run newest first, so the base class goes in first.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<UnknownModel>(m, "UnknownModel", base.ptr());

  py::class_<DeviceParams>(m, "DeviceParams")
      .def(py::init<>())
      .def_readwrite("mr_through_loss_db", &DeviceParams::mr_through_loss_db)
      .def_readwrite("mr_drop_loss_db", &DeviceParams::mr_drop_loss_db)
      .def_readwrite("mr_modulator_insertion_db", &DeviceParams::mr_modulator_insertion_db)
      .def_readwrite("mzi_insertion_loss_db", &DeviceParams::mzi_insertion_loss_db)
      .def_readwrite("waveguide_prop_loss_db_per_cm", &DeviceParams::waveguide_prop_loss_db_per_cm)
      .def_readwrite("coupler_loss_db", &DeviceParams::coupler_loss_db)
      .def_readwrite("splitter_loss_db", &DeviceParams::splitter_loss_db)
      .def_readwrite("pd_sensitivity_dbm", &DeviceParams::pd_sensitivity_dbm)
      .def_readwrite("link_margin_db", &DeviceParams::link_margin_db)
      .def_readwrite("laser_wall_plug_efficiency", &DeviceParams::laser_wall_plug_efficiency)
      .def_readwrite("mr_trim_power_mw", &DeviceParams::mr_trim_power_mw)
      .def_readwrite("wavelengths_per_waveguide", &DeviceParams::wavelengths_per_waveguide)
      .def_readwrite("modulation_rate_hz", &DeviceParams::modulation_rate_hz)
      .def("validate", &DeviceParams::validate);

  m.def("required_laser_power_mw", &required_laser_power_mw, py::arg("worst_loss_db"), py::arg("params") = DeviceParams{});
  m.def("wall_plug_laser_power_mw", &wall_plug_laser_power_mw, py::arg("optical_mw"),
        py::arg("params") = DeviceParams{});
  m.def("subnetwork_count_for_memory_bw", &subnetwork_count_for_memory_bw, py::arg("memory_bw_bytes_per_s"),
        py::arg("params") = DeviceParams{}, py::arg("compute_gateways") = 32);
  m.def("stage_count_for", &stage_count_for);
  m.def("builtin_model_names", &builtin_model_names);
  m.def("evaluation_topologies", &evaluation_topologies);

  m.def(
      "inspect_topology",
      [](const std::string& name, int subnetworks, const DeviceParams& params) {
        auto platform = interposer_eval_platform();
        auto t = build_topology(kind_from_name(name, subnetworks), platform, params);
        py::dict d;
        d["topology"] = t.kind.name();
        d["stage_count"] = t.stage_count;
        d["mzi_switches"] = t.device_inventory.mzi_switches;
        d["mr_modulators"] = t.device_inventory.mr_modulators;
        d["mr_filters"] = t.device_inventory.mr_filters;
        d["laser_sources"] = t.device_inventory.laser_sources;
        if (t.kind.photonic()) d["worst_loss_db"] = worst_case_path(t, params).loss_db;
        return d;
      },
      py::arg("topology"), py::arg("subnetworks") = 8, py::arg("params") = DeviceParams{});

  py::class_<RunConfig>(m, "RunConfig")
      .def_static("default", &default_config)
      .def_static("load", &load_config, py::arg("path"))
      .def_static("parse",
                  [](const std::string& text) {
                    std::istringstream in(text);
                    return parse_config(in);
                  })
      .def_readwrite("device", &RunConfig::device)
      .def_readwrite("baseline", &RunConfig::baseline)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_property(
          "model", [](const RunConfig& c) { return c.workload.model; },
          [](RunConfig& c, const std::string& v) { c.workload.model = v; })
      .def_property_readonly("topology", [](const RunConfig& c) { return topology_name(c.network); })
      .def_property_readonly("platform", [](const RunConfig& c) { return c.platform_name; });

  m.def("run", [](const RunConfig& c) { return rows(run(c)); }, py::arg("config"));
  m.def(
      "sweep",
      [](const RunConfig& c, const std::vector<std::string>& topologies, const std::vector<std::string>& models,
         const std::string& out) {
        SimReport r;
        {
          py::gil_scoped_release release;
          r = sweep(c, topologies, models);
          if (!out.empty()) write_report(r, out);
        }
        return rows(r);
      },
      py::arg("config"), py::arg("topologies"), py::arg("models"), py::arg("out") = "");
}
