"""Discrete-event simulation of a static mesh running AODV-style routing.

The channel is a lossless unit disk with a fixed per-hop latency plus
serialization at the configured data rate; there is no MAC contention.
Routes are found by RREQ flooding with first-RREP-wins at every node,
which is exactly what lets a blackhole capture a route by answering at
once. The two DS-Trust schemes add watchdog monitoring, periodic trust
evaluation and blacklisting. ``ds_trust`` also exchanges recommendations and
floods its blacklist decisions; ``ds_trust_no_recs`` acts on first-hand
observations only, so each node keeps its blacklist to itself.
"""

from __future__ import annotations

import heapq
import itertools
import random
from collections import deque
from collections.abc import Callable
from dataclasses import dataclass

from dstrust.evidence import FusionInput, fuse
from dstrust.netsim.config import SimConfig
from dstrust.netsim.metrics import Counters, MetricsReport, compute_metrics
from dstrust.trust import BOOTSTRAP_TRUST, TrustRecord, indirect_trust

DATA = "DATA"
RREQ = "RREQ"
RREP = "RREP"
RERR = "RERR"
TRUST_REQ = "TRUST_REQ"
TRUST_REP = "TRUST_REP"
BLACKLIST = "BLACKLIST"

BROADCAST = -1

CONTROL_SIZES = {
    RREQ: 52,
    RREP: 48,
    RERR: 40,
    TRUST_REQ: 36,
    TRUST_REP: 40,
    BLACKLIST: 36,
}

_DONE = object()


@dataclass(slots=True)
class Packet:
    kind: str
    source: int
    destination: int
    previous_hop: int = -1
    next_hop: int = BROADCAST
    flow: int = -1
    seq: int = 0
    size: int = 0
    uid: int = 0
    hops: int = 0
    target: int = -1
    value: float = 0.0


class Node:
    __slots__ = (
        "id",
        "role",
        "drop_prob",
        "neighbors",
        "routes",
        "seen_rreq",
        "rrep_state",
        "blacklist",
        "records",
        "watch",
        "flows_via",
        "discovery",
        "buffers",
        "holddown",
        "rreq_counter",
        "collect",
        "drop_rng",
        "overhear_rng",
        "phase",
    )

    def __init__(self, node_id: int, neighbors: tuple[int, ...], seed: int) -> None:
        self.id = node_id
        self.role = "honest"
        self.drop_prob = 0.0
        self.neighbors = neighbors
        self.routes: dict[int, tuple[int, int]] = {}
        self.seen_rreq: set[tuple[int, int]] = set()
        self.rrep_state: dict[tuple[int, int, int], object] = {}
        self.blacklist: dict[int, float] = {}
        self.records: dict[int, TrustRecord] = {}
        self.watch: dict[int, tuple[int, float]] = {}
        self.flows_via: dict[int, set[tuple[int, int]]] = {}
        self.discovery: dict[int, tuple[int, int]] = {}
        self.buffers: dict[int, deque] = {}
        self.holddown: dict[int, float] = {}
        self.rreq_counter = 0
        self.collect: dict[int, list[tuple[int, float]]] | None = None
        self.drop_rng = random.Random(f"{seed}:{node_id}:drop")
        self.overhear_rng = random.Random(f"{seed}:{node_id}:overhear")
        self.phase = random.Random(f"{seed}:{node_id}:phase").random()

    @property
    def honest(self) -> bool:
        return self.role == "honest"

    def record_for(self, neighbor: int) -> TrustRecord:
        rec = self.records.get(neighbor)
        if rec is None:
            rec = self.records[neighbor] = TrustRecord(subject=neighbor)
        return rec


class Simulator:
    """One run of the mesh simulation for a (config, seed) pair."""

    def __init__(self, cfg: SimConfig, seed: int = 0) -> None:
        self.cfg = cfg
        self.seed = seed
        self.topology = cfg.topology()
        self.flows = cfg.resolved_flows()
        self.attackers = cfg.resolved_attackers(seed)
        self.nodes = [Node(i, self.topology.neighbors[i], seed) for i in range(len(self.topology))]
        for attacker in self.attackers:
            node = self.nodes[attacker.node]
            node.role = attacker.role
            node.drop_prob = attacker.drop_prob
        self.trusting = cfg.scheme != "baseline"
        self.recommending = cfg.scheme == "ds_trust"
        # without recommendations no second-hand opinion reaches other nodes,
        # and a blacklist broadcast is exactly such an opinion
        self.flooding = self.recommending
        self.now = 0.0
        self._queue: list = []
        self._seq = itertools.count()
        self._uid = itertools.count(1)
        self._in_flight: set[int] = set()
        self.first_handoff: dict[tuple[int, int], float] = {}
        self.counters = Counters(
            n_nodes=len(self.nodes), sim_time_s=cfg.sim_time_s, packet_size_bytes=cfg.packet_size_bytes
        )
        self.route_violations = 0
        self.trace: list[str] = []
        self._handlers: dict[str, Callable[[Node, Packet], None]] = {
            DATA: self._on_data,
            RREQ: self._on_rreq,
            RREP: self._on_rrep,
            RERR: self._on_rerr,
            TRUST_REQ: self._on_trust_req,
            TRUST_REP: self._on_trust_rep,
            BLACKLIST: self._on_blacklist,
        }

    # event loop

    def schedule(self, time: float, fn: Callable, *args, priority: int = 0) -> None:
        heapq.heappush(self._queue, (time, priority, next(self._seq), fn, args))

    def run(self) -> MetricsReport:
        cfg = self.cfg
        interval = 1.0 / cfg.packets_per_s
        for index, flow in enumerate(self.flows):
            if flow.start_s < cfg.sim_time_s:
                self.schedule(flow.start_s, self._generate, index, 0, interval)
        if self.trusting:
            for node in self.nodes:
                if node.honest:
                    self.schedule(node.phase * cfg.period_s, self._tick, node)
        horizon = cfg.sim_time_s + cfg.drain_s
        queue = self._queue
        while queue:
            time, _, _, fn, args = heapq.heappop(queue)
            if time > horizon:
                break
            self.now = time
            fn(*args)
        self.counters.in_flight = len(self._in_flight)
        for (upstream, attacker), sent_at in self.first_handoff.items():
            blacklisted_at = self.nodes[upstream].blacklist.get(attacker)
            self.counters.upstream_latency[(upstream, attacker)] = (
                None if blacklisted_at is None else blacklisted_at - sent_at
            )
        return compute_metrics(self.counters)

    # transmission

    def _delay(self, size: int) -> float:
        return self.cfg.hop_latency_s + size * 8 / self.cfg.data_rate_bps

    def _transmit(self, sender: Node, pkt: Packet) -> None:
        if pkt.kind != DATA:
            self.counters.control[pkt.kind] += 1
            pkt.size = CONTROL_SIZES[pkt.kind]
        pkt.previous_hop = sender.id
        if self.cfg.trace:
            self.trace.append(f"{self.now:.6f} {sender.id} {pkt.kind} {pkt.next_hop}")
        when = self.now + self._delay(pkt.size)
        if pkt.next_hop == BROADCAST:
            self.schedule(when, self._deliver_broadcast, sender.id, pkt)
        else:
            self.schedule(when, self._deliver, self.nodes[pkt.next_hop], pkt)

    def _deliver_broadcast(self, sender: int, pkt: Packet) -> None:
        handler = self._handlers[pkt.kind]
        for nb in self.topology.neighbors[sender]:
            node = self.nodes[nb]
            if sender not in node.blacklist:
                handler(node, pkt)

    def _deliver(self, node: Node, pkt: Packet) -> None:
        if pkt.previous_hop in node.blacklist:
            if pkt.kind == DATA:
                self._drop(pkt, attacker=False)
            return
        self._handlers[pkt.kind](node, pkt)

    # data plane

    def _generate(self, flow_index: int, k: int, interval: float) -> None:
        flow = self.flows[flow_index]
        uid = next(self._uid)
        self.counters.generated += 1
        self._in_flight.add(uid)
        pkt = Packet(
            DATA, flow.src, flow.dst, flow=flow_index, seq=k, size=self.cfg.packet_size_bytes, uid=uid
        )
        self._source_send(self.nodes[flow.src], pkt)
        nxt = flow.start_s + (k + 1) * interval
        if nxt < self.cfg.sim_time_s:
            self.schedule(nxt, self._generate, flow_index, k + 1, interval)

    def _drop(self, pkt: Packet, attacker: bool) -> None:
        self._in_flight.discard(pkt.uid)
        if attacker:
            self.counters.dropped_attacker += 1
        else:
            self.counters.dropped_route += 1

    def _usable_route(self, node: Node, dst: int) -> int | None:
        route = node.routes.get(dst)
        if route is None or route[0] in node.blacklist:
            return None
        return route[0]

    def _source_send(self, node: Node, pkt: Packet) -> None:
        next_hop = self._usable_route(node, pkt.destination)
        if next_hop is not None:
            self._send_data(node, next_hop, pkt)
            return
        dst = pkt.destination
        if self.now < node.holddown.get(dst, -1.0):
            self._drop(pkt, attacker=False)
            return
        buffer = node.buffers.setdefault(dst, deque())
        if len(buffer) >= self.cfg.buffer_packets:
            self._drop(pkt, attacker=False)
            return
        buffer.append(pkt)
        if dst not in node.discovery:
            self._start_discovery(node, dst, attempt=0)

    def _send_data(self, node: Node, next_hop: int, pkt: Packet) -> None:
        # a DATA packet has exactly one holder at a time, so it is reused per hop
        pkt.next_hop = next_hop
        pkt.hops += 1
        node.flows_via.setdefault(next_hop, set()).add((pkt.source, pkt.destination))
        if self.nodes[next_hop].role == "blackhole":
            self.first_handoff.setdefault((node.id, next_hop), self.now)
        if self.trusting and node.honest and next_hop != pkt.destination:
            node.watch[pkt.uid] = (next_hop, self.now)
            if next_hop not in node.records:
                node.records[next_hop] = TrustRecord(subject=next_hop)
        self._transmit(node, pkt)

    def _overheard(self, upstream: int, uid: int) -> None:
        observer = self.nodes[upstream]
        entry = observer.watch.pop(uid, None)
        if entry is None:
            return
        p_miss = self.cfg.p_miss
        caught = p_miss == 0.0 or observer.overhear_rng.random() >= p_miss
        observer.record_for(entry[0]).record(caught)

    def _on_data(self, node: Node, pkt: Packet) -> None:
        if node.id == pkt.destination:
            self._in_flight.discard(pkt.uid)
            self.counters.delivered += 1
            return
        if node.role == "blackhole":
            self._drop(pkt, attacker=True)
            return
        if node.role == "grayhole" and node.drop_rng.random() < node.drop_prob:
            self._drop(pkt, attacker=True)
            return
        next_hop = self._usable_route(node, pkt.destination)
        if next_hop is None:
            # the upstream overhears the RERR, so this is not held against us
            self.nodes[pkt.previous_hop].watch.pop(pkt.uid, None)
            self._drop(pkt, attacker=False)
            self._send_rerr(node, pkt.source, pkt.destination)
            return
        self._overheard(pkt.previous_hop, pkt.uid)
        self._send_data(node, next_hop, pkt)

    # route discovery

    def _start_discovery(self, node: Node, dst: int, attempt: int) -> None:
        node.rreq_counter += 1
        rid = node.rreq_counter
        node.discovery[dst] = (rid, attempt)
        node.seen_rreq.add((node.id, rid))
        self._transmit(node, Packet(RREQ, node.id, dst, seq=rid))
        self.schedule(self.now + self.cfg.rreq_timeout_s, self._discovery_timeout, node, dst, rid)

    def _discovery_timeout(self, node: Node, dst: int, rid: int) -> None:
        pending = node.discovery.get(dst)
        if pending is None or pending[0] != rid:
            return
        if pending[1] < self.cfg.rreq_retries:
            self._start_discovery(node, dst, pending[1] + 1)
            return
        del node.discovery[dst]
        node.holddown[dst] = self.now + self.cfg.route_holddown_s
        for pkt in node.buffers.pop(dst, ()):
            self._drop(pkt, attacker=False)

    def _on_rreq(self, node: Node, pkt: Packet) -> None:
        key = (pkt.source, pkt.seq)
        if key in node.seen_rreq:
            return
        node.seen_rreq.add(key)
        node.routes[pkt.source] = (pkt.previous_hop, pkt.hops + 1)
        if node.id == pkt.destination or node.role == "blackhole":
            # a blackhole claims to be one hop from the destination
            hops = 0 if node.id == pkt.destination else 1
            reply = Packet(RREP, pkt.source, pkt.destination, next_hop=pkt.previous_hop, seq=pkt.seq, hops=hops)
            self._transmit(node, reply)
            return
        self._transmit(node, Packet(RREQ, pkt.source, pkt.destination, seq=pkt.seq, hops=pkt.hops + 1))

    def _on_rrep(self, node: Node, pkt: Packet) -> None:
        if node.role == "blackhole":
            return
        key = (pkt.source, pkt.destination, pkt.seq)
        state = node.rrep_state.get(key)
        if state is _DONE:
            return
        if state is None:
            node.rrep_state[key] = [pkt]
            # runs after every other event at this instant, so ties can be compared
            self.schedule(self.now, self._commit_rrep, node, key, priority=1)
        else:
            state.append(pkt)

    def _commit_rrep(self, node: Node, key: tuple[int, int, int]) -> None:
        candidates = [p for p in node.rrep_state[key] if p.previous_hop not in node.blacklist]
        node.rrep_state[key] = _DONE
        if not candidates:
            return
        best = min(candidates, key=lambda p: (p.hops, p.previous_hop))
        origin, dst = best.source, best.destination
        if node.id == origin:
            if dst not in node.discovery:
                return
            node.routes[dst] = (best.previous_hop, best.hops + 1)
            del node.discovery[dst]
            self._check_route(node, dst)
            for pkt in node.buffers.pop(dst, ()):
                self._send_data(node, best.previous_hop, pkt)
            return
        node.routes[dst] = (best.previous_hop, best.hops + 1)
        back = self._usable_route(node, origin)
        if back is None:
            return
        self._transmit(node, Packet(RREP, origin, dst, next_hop=back, seq=best.seq, hops=best.hops + 1))

    def route_path(self, src: int, dst: int) -> list[int]:
        """Hop-by-hop path currently installed from ``src`` toward ``dst``."""
        path = [src]
        current = src
        for _ in range(len(self.nodes)):
            route = self.nodes[current].routes.get(dst)
            if route is None:
                break
            current = route[0]
            path.append(current)
            if current == dst:
                break
        return path

    def _check_route(self, source: Node, dst: int) -> None:
        if self.flooding and any(hop in source.blacklist for hop in self.route_path(source.id, dst)[1:]):
            self.route_violations += 1

    def _send_rerr(self, node: Node, src: int, dst: int) -> None:
        if node.id == src:
            self._route_lost(node, dst)
            return
        back = self._usable_route(node, src)
        if back is None:
            return
        self._transmit(node, Packet(RERR, src, dst, next_hop=back))

    def _on_rerr(self, node: Node, pkt: Packet) -> None:
        route = node.routes.get(pkt.destination)
        if route is not None and route[0] != pkt.previous_hop:
            return
        node.routes.pop(pkt.destination, None)
        self._send_rerr(node, pkt.source, pkt.destination)

    def _route_lost(self, node: Node, dst: int) -> None:
        route = node.routes.get(dst)
        if route is not None and route[0] not in node.blacklist:
            return
        node.routes.pop(dst, None)
        if dst not in node.discovery and self.now < self.cfg.sim_time_s:
            if self.now >= node.holddown.get(dst, -1.0):
                self._start_discovery(node, dst, attempt=0)

    # trust

    def expire_watch(self, node: Node) -> None:
        """Count every expectation older than the watchdog timeout as a miss."""
        cutoff = self.now - self.cfg.watchdog_timeout_s
        stale = [uid for uid, (_, sent_at) in node.watch.items() if sent_at < cutoff]
        for uid in stale:
            neighbor, _ = node.watch.pop(uid)
            node.record_for(neighbor).record(False)

    def _tick(self, node: Node) -> None:
        cfg = self.cfg
        self.expire_watch(node)
        traffic = []
        for neighbor, rec in node.records.items():
            if neighbor in node.blacklist:
                continue
            if rec.close_period(cfg.alpha, self.now) is not None:
                traffic.append(neighbor)
        if self.recommending:
            if cfg.rec_scope == "traffic":
                targets = traffic
            else:
                targets = [nb for nb in node.neighbors if nb not in node.blacklist]
            if targets:
                node.collect = {t: [] for t in targets}
                for target in targets:
                    self._transmit(node, Packet(TRUST_REQ, node.id, BROADCAST, target=target))
                self.schedule(self.now + cfg.rec_window_s, self._fuse_collected, node, frozenset(traffic))
        else:
            for neighbor in traffic:
                self._evaluate(node, neighbor, node.records[neighbor].smoothed_trust, [])
        if self.now + cfg.period_s < cfg.sim_time_s:
            self.schedule(self.now + cfg.period_s, self._tick, node)

    def _on_trust_req(self, node: Node, pkt: Packet) -> None:
        if not node.honest or node.id == pkt.target:
            return
        rec = node.records.get(pkt.target)
        if rec is None:
            return
        self.expire_watch(node)
        if rec.packets_sent >= max(1, self.cfg.rec_min_samples):
            value = rec.preview(self.cfg.alpha)
        else:
            value = rec.smoothed_trust if rec.observed else None
        if value is None:
            return
        reply = Packet(TRUST_REP, node.id, pkt.source, next_hop=pkt.source, target=pkt.target, value=value)
        self._transmit(node, reply)

    def _on_trust_rep(self, node: Node, pkt: Packet) -> None:
        if node.collect is None or pkt.target not in node.collect:
            return
        node.collect[pkt.target].append((pkt.source, pkt.value))

    def _fuse_collected(self, node: Node, traffic: frozenset) -> None:
        collected, node.collect = node.collect or {}, None
        for target, reports in collected.items():
            if target in node.blacklist or (not reports and target not in traffic):
                continue
            rec = node.records.get(target)
            direct = rec.smoothed_trust if rec is not None and rec.observed else BOOTSTRAP_TRUST
            self._evaluate(node, target, direct, reports)

    def _evaluate(self, node: Node, target: int, direct: float, reports: list[tuple[int, float]]) -> None:
        recommendations = []
        for recommender, value in reports:
            if recommender in node.blacklist:
                continue
            weight = 1.0
            if self.cfg.recommender_weighting:
                rec = node.records.get(recommender)
                if rec is not None and rec.observed:
                    weight = rec.smoothed_trust
            recommendations.append((recommender, indirect_trust(weight, value)))
        self.counters.fusion_ops += len(recommendations)
        self.decide(node, target, fuse(FusionInput(direct, tuple(recommendations), self.cfg.gamma)))

    def decide(self, node: Node, target: int, fused_trust: float) -> bool:
        """Blacklist ``target`` when its fused trust is strictly below gamma."""
        if fused_trust < self.cfg.gamma:
            self._blacklist(node, target, decided=True)
            return True
        return False

    def _blacklist(self, node: Node, target: int, decided: bool) -> None:
        if decided:
            counts = self.counters.blacklist_counts
            counts[target] = counts.get(target, 0) + 1
        if target in node.blacklist:
            return
        node.blacklist[target] = self.now
        if self.cfg.trace:
            self.trace.append(f"{self.now:.6f} {node.id} BLACKLISTED {target}")
        if self.nodes[target].honest:
            self.counters.honest_blacklisted.add(target)
        else:
            self.counters.detected_attackers.add(target)
            self.counters.detection_times.setdefault(target, self.now)
        for uid in [uid for uid, (nb, _) in node.watch.items() if nb == target]:
            del node.watch[uid]
        for dst in [d for d, (nh, _) in node.routes.items() if nh == target]:
            del node.routes[dst]
        for src, dst in sorted(node.flows_via.pop(target, ())):
            self._send_rerr(node, src, dst)
        if self.flooding:
            self._transmit(node, Packet(BLACKLIST, node.id, BROADCAST, target=target))

    def _on_blacklist(self, node: Node, pkt: Packet) -> None:
        if node.honest and node.id != pkt.target:
            self._blacklist(node, pkt.target, decided=False)


def run_simulation(cfg: SimConfig, seed: int = 0) -> MetricsReport:
    return Simulator(cfg, seed).run()
