"""Discrete-event mesh network simulator with DS-Trust blackhole defence."""

from dstrust.netsim.config import AttackerSpec, ConfigError, FlowSpec, SimConfig
from dstrust.netsim.metrics import MetricsReport, compute_metrics
from dstrust.netsim.sim import Simulator, run_simulation
from dstrust.netsim.topology import Topology, build_grid, build_line

__all__ = [
    "AttackerSpec",
    "ConfigError",
    "FlowSpec",
    "MetricsReport",
    "SimConfig",
    "Simulator",
    "Topology",
    "build_grid",
    "build_line",
    "compute_metrics",
    "run_simulation",
]
