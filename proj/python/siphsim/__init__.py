"""Chiplet interposer network simulator."""

from ._siphsim import (
    ConfigError,
    DeviceParams,
    Error,
    RunConfig,
    UnknownModel,
    builtin_model_names,
    evaluation_topologies,
    inspect_topology,
    required_laser_power_mw,
    run,
    stage_count_for,
    subnetwork_count_for_memory_bw,
    sweep,
    wall_plug_laser_power_mw,
)

__all__ = [
    "ConfigError",
    "DeviceParams",
    "Error",
    "RunConfig",
    "UnknownModel",
    "builtin_model_names",
    "evaluation_topologies",
    "inspect_topology",
    "required_laser_power_mw",
    "run",
    "stage_count_for",
    "subnetwork_count_for_memory_bw",
    "sweep",
    "wall_plug_laser_power_mw",
]
