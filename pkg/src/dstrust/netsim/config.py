"""Simulation configuration and its YAML form.

Keys mirror the simulation-parameter table of the experiments (grid
spacing, range, data rate, packet size, ...). Attackers may be given
explicitly or as counts that are placed at random per seed.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import yaml

from dstrust.netsim.topology import Topology, build_grid

SCHEMES = ("baseline", "ds_trust", "ds_trust_no_recs")
REC_SCOPES = ("neighbors", "traffic")
ROLES = ("honest", "blackhole", "grayhole")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AttackerSpec:
    node: int
    role: str = "blackhole"
    drop_prob: float = 1.0

    def __post_init__(self) -> None:
        if self.role not in ROLES[1:]:
            raise ConfigError(f"attacker role must be blackhole or grayhole, got {self.role!r}")
        if not 0.0 <= self.drop_prob <= 1.0:
            raise ConfigError(f"drop_prob must lie in [0, 1], got {self.drop_prob!r}")


@dataclass(frozen=True)
class FlowSpec:
    src: int
    dst: int
    start_s: float = 1.0

    def __post_init__(self) -> None:
        if self.src == self.dst:
            raise ConfigError("flow source and destination must differ")
        if self.start_s < 0:
            raise ConfigError("flow start_s must be nonnegative")


@dataclass(frozen=True)
class SimConfig:
    grid_rows: int = 10
    grid_cols: int = 10
    spacing_m: float = 150.0
    range_m: float = 250.0
    positions: tuple[tuple[float, float], ...] | None = None
    data_rate_bps: float = 16_000.0
    packet_size_bytes: int = 512
    packets_per_s: float = 4.0
    sim_time_s: float = 300.0
    gamma: float = 0.5
    period_s: float = 20.0
    alpha: float = 0.5
    p_miss: float = 0.0
    scheme: str = "ds_trust"
    attackers: tuple[AttackerSpec, ...] = ()
    flows: tuple[FlowSpec, ...] | None = None
    n_blackholes: int = 0
    n_grayholes: int = 0
    grayhole_drop_prob: float = 0.5
    hop_latency_s: float = 0.002
    watchdog_timeout_s: float = 1.0
    rec_window_s: float = 0.5
    rreq_timeout_s: float = 1.5
    rreq_retries: int = 2
    route_holddown_s: float = 5.0
    buffer_packets: int = 64
    drain_s: float = 10.0
    recommender_weighting: bool = True
    # "neighbors": ask about every neighbor each tick; "traffic": only those carrying our packets
    rec_scope: str = "neighbors"
    # a recommender reports its in-progress period only once it holds this many samples
    rec_min_samples: int = 40
    trace: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "attackers", tuple(_coerce(AttackerSpec, a) for a in self.attackers))
        if self.flows is not None:
            object.__setattr__(self, "flows", tuple(_coerce(FlowSpec, f) for f in self.flows))
        if self.positions is not None:
            object.__setattr__(self, "positions", tuple((float(x), float(y)) for x, y in self.positions))
        self.validate()

    def validate(self) -> None:
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {', '.join(SCHEMES)}, got {self.scheme!r}")
        if self.grid_rows < 1 or self.grid_cols < 1:
            raise ConfigError("grid_rows and grid_cols must be at least 1")
        for name in ("spacing_m", "data_rate_bps", "packets_per_s", "sim_time_s", "period_s", "rreq_timeout_s"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("range_m", "hop_latency_s", "watchdog_timeout_s", "rec_window_s", "drain_s", "route_holddown_s"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative")
        if self.rec_scope not in REC_SCOPES:
            raise ConfigError(f"rec_scope must be one of {', '.join(REC_SCOPES)}, got {self.rec_scope!r}")
        if self.rec_min_samples < 0:
            raise ConfigError("rec_min_samples must be nonnegative")
        if self.packet_size_bytes < 1 or self.buffer_packets < 1 or self.rreq_retries < 0:
            raise ConfigError("packet_size_bytes and buffer_packets must be positive, rreq_retries nonnegative")
        if not 0.0 < self.gamma < 1.0:
            raise ConfigError("gamma must lie in (0, 1)")
        for name in ("alpha", "p_miss", "grayhole_drop_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        n = self.n_nodes
        endpoints = set()
        for flow in self.resolved_flows():
            for node in (flow.src, flow.dst):
                if not 0 <= node < n:
                    raise ConfigError(f"flow endpoint {node} is not a node")
                endpoints.add(node)
        seen = set()
        for attacker in self.attackers:
            if not 0 <= attacker.node < n:
                raise ConfigError(f"attacker {attacker.node} is not a node")
            if attacker.node in seen:
                raise ConfigError(f"attacker {attacker.node} listed twice")
            seen.add(attacker.node)
        free = n - len(endpoints) - len(seen)
        if self.n_blackholes < 0 or self.n_grayholes < 0 or self.n_blackholes + self.n_grayholes > free:
            raise ConfigError("not enough non-endpoint nodes for the requested random attackers")

    @property
    def n_nodes(self) -> int:
        if self.positions is not None:
            return len(self.positions)
        return self.grid_rows * self.grid_cols

    def topology(self) -> Topology:
        if self.positions is not None:
            return Topology.from_positions(self.positions, self.range_m)
        return build_grid(self.grid_rows, self.grid_cols, self.spacing_m, self.range_m)

    def resolved_flows(self) -> tuple[FlowSpec, ...]:
        """Explicit flows, or one flow per grid row from the leftmost to the rightmost column."""
        if self.flows is not None:
            return self.flows
        if self.positions is not None or self.grid_cols < 2:
            return ()
        cols = self.grid_cols
        return tuple(
            FlowSpec(src=r * cols, dst=r * cols + cols - 1, start_s=1.0 + 0.5 * r) for r in range(self.grid_rows)
        )

    def resolved_attackers(self, seed: int) -> tuple[AttackerSpec, ...]:
        """Explicit attackers plus the random ones drawn for ``seed``.

        Candidates are shuffled once per seed, so a run with k attackers uses
        a prefix of the placement a run with k + 1 attackers would use.
        """
        if not (self.n_blackholes or self.n_grayholes):
            return self.attackers
        taken = {a.node for a in self.attackers}
        taken.update(n for f in self.resolved_flows() for n in (f.src, f.dst))
        candidates = [n for n in range(self.n_nodes) if n not in taken]
        random.Random(f"{seed}:placement").shuffle(candidates)
        chosen = [AttackerSpec(n, "blackhole", 1.0) for n in candidates[: self.n_blackholes]]
        rest = candidates[self.n_blackholes : self.n_blackholes + self.n_grayholes]
        chosen += [AttackerSpec(n, "grayhole", self.grayhole_drop_prob) for n in rest]
        return self.attackers + tuple(chosen)

    def with_overrides(self, **overrides: Any) -> SimConfig:
        unknown = set(overrides) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        return replace(self, **overrides)

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["attackers"] = [asdict(a) for a in self.attackers]
        data["flows"] = None if self.flows is None else [asdict(f) for f in self.flows]
        data["positions"] = None if self.positions is None else [list(p) for p in self.positions]
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SimConfig:
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def _coerce(kind: type, value: Any) -> Any:
    if isinstance(value, kind):
        return value
    if isinstance(value, dict):
        try:
            return kind(**value)
        except TypeError as exc:
            raise ConfigError(f"bad {kind.__name__} entry {value!r}: {exc}") from exc
    raise ConfigError(f"expected a mapping for {kind.__name__}, got {value!r}")


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a YAML config file into a plain mapping."""
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping at the top level")
    return data


def dump_config(data: dict[str, Any], path: str | Path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(data, fh, sort_keys=False)


def parse_override(text: str) -> tuple[str, Any]:
    """Split ``key=value`` and parse the value as YAML (numbers, bools, lists)."""
    key, sep, raw = text.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"override must look like key=value, got {text!r}")
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse override {text!r}: {exc}") from exc
    return key.strip(), value
