"""Run counters and the metrics derived from them."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

CONTROL_KINDS = ("RREQ", "RREP", "RERR", "TRUST_REQ", "TRUST_REP", "BLACKLIST")
NRO_UNDEFINED = "NA"


@dataclass
class Counters:
    n_nodes: int = 0
    sim_time_s: float = 0.0
    packet_size_bytes: int = 512
    generated: int = 0
    delivered: int = 0
    dropped_attacker: int = 0
    dropped_route: int = 0
    in_flight: int = 0
    control: Counter = field(default_factory=Counter)
    fusion_ops: int = 0
    honest_blacklisted: set[int] = field(default_factory=set)
    detected_attackers: set[int] = field(default_factory=set)
    detection_times: dict[int, float] = field(default_factory=dict)
    blacklist_counts: dict[int, int] = field(default_factory=dict)
    upstream_latency: dict[tuple[int, int], float | None] = field(default_factory=dict)


@dataclass(frozen=True)
class MetricsReport:
    pdr: float
    nro: float | None
    throughput_bps: float
    false_positive_rate: float
    detected_attackers: tuple[int, ...]
    detection_times: dict[int, float]
    generated: int
    delivered: int
    dropped_attacker: int
    dropped_route: int
    in_flight: int
    control_packets: dict[str, int]
    fusion_ops: int
    blacklist_counts: dict[int, int]
    upstream_latency: dict[tuple[int, int], float | None]

    @property
    def conserved(self) -> bool:
        return self.generated == self.delivered + self.dropped_attacker + self.dropped_route + self.in_flight

    def nro_text(self) -> str:
        return NRO_UNDEFINED if self.nro is None else repr(self.nro)


def compute_metrics(counters: Counters) -> MetricsReport:
    """Reduce raw counters to PDR, NRO, throughput and false-positive rate.

    NRO is None when nothing was delivered; there is no finite ratio then.
    """
    control_total = sum(counters.control[k] for k in CONTROL_KINDS)
    pdr = counters.delivered / counters.generated if counters.generated else 0.0
    nro = control_total / counters.delivered if counters.delivered else None
    throughput = counters.delivered * counters.packet_size_bytes * 8 / counters.sim_time_s
    fpr = len(counters.honest_blacklisted) / counters.n_nodes if counters.n_nodes else 0.0
    return MetricsReport(
        pdr=pdr,
        nro=nro,
        throughput_bps=throughput,
        false_positive_rate=fpr,
        detected_attackers=tuple(sorted(counters.detected_attackers)),
        detection_times=dict(sorted(counters.detection_times.items())),
        generated=counters.generated,
        delivered=counters.delivered,
        dropped_attacker=counters.dropped_attacker,
        dropped_route=counters.dropped_route,
        in_flight=counters.in_flight,
        control_packets={k: counters.control[k] for k in CONTROL_KINDS},
        fusion_ops=counters.fusion_ops,
        blacklist_counts=dict(sorted(counters.blacklist_counts.items())),
        upstream_latency=dict(sorted(counters.upstream_latency.items())),
    )
