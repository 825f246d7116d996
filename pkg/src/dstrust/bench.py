"""Star-topology recommendation-attack sweep.

Node A holds a direct trust value for node B and receives recommendations
about B from up to ``n_recommenders`` other nodes. At sweep point k there
are k lying recommenders (and, if ``honest_value`` is set, n - k honest
ones). Each scheme aggregates the evidence into one trust value for B.
"""

from __future__ import annotations

import csv
from collections.abc import Callable, Iterable, Sequence
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path

from dstrust import aggregators as agg
from dstrust.evidence import fuse_mass
from dstrust.trust import entropy_trust, indirect_trust

CSV_HEADER = ("scheme", "attack", "attackers", "trust")


class Attack(str, Enum):
    BADMOUTH = "badmouth"
    BALLOT_STUFF = "ballot_stuff"


SCHEMES = ("ds_trust", "linear_pool", "subjective_logic", "entropy_model")


@dataclass(frozen=True)
class SweepConfig:
    """Parameters of one attack sweep.

    ``honest_value=None`` means only the k attackers report at point k,
    i.e. one more lying recommender joins each round.
    """

    attack: Attack = Attack.BADMOUTH
    n_recommenders: int = 20
    lie_value: float | None = None
    honest_value: float | None = None
    direct_trust_of_target: float | None = None
    recommender_trust: float = 1.0
    gamma: float = 0.5
    schemes: tuple[str, ...] = SCHEMES
    pool_direct_weight: float = 0.5
    opinion_uncertainty: float = 0.1
    opinion_base_rate: float = 0.5
    beta_weight: float = 10.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "attack", Attack(self.attack))
        if self.lie_value is None:
            object.__setattr__(self, "lie_value", 0.1 if self.attack is Attack.BADMOUTH else 0.9)
        if self.direct_trust_of_target is None:
            # 0.89 is the direct trust for which a 0.5/0.5 linear pool of a 0.1
            # recommendation lands on 0.495
            default = 0.89 if self.attack is Attack.BADMOUTH else 0.1
            object.__setattr__(self, "direct_trust_of_target", default)
        if self.n_recommenders < 0:
            raise ValueError("n_recommenders must be nonnegative")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown:
            raise ValueError(f"unknown scheme(s): {', '.join(sorted(unknown))}")
        for name in ("lie_value", "direct_trust_of_target", "recommender_trust", "gamma"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        if self.honest_value is not None and not 0.0 <= self.honest_value <= 1.0:
            raise ValueError(f"honest_value must lie in [0, 1], got {self.honest_value!r}")

    def recommendations(self, attackers: int) -> list[float]:
        """Reported trust values at one sweep point, liars first."""
        reports = [self.lie_value] * attackers
        if self.honest_value is not None:
            reports += [self.honest_value] * (self.n_recommenders - attackers)
        return reports

    def wiring(self) -> dict[str, str]:
        return {
            "ds_trust": "direct bpa folded with one Dempster combination per recommendation; belief in {T}",
            "linear_pool": f"uniform pool of indirect trusts, then {self.pool_direct_weight}/{1 - self.pool_direct_weight} with direct trust",
            "subjective_logic": (
                f"opinions with u={self.opinion_uncertainty}, a={self.opinion_base_rate}; each recommendation "
                "discounted by the recommender opinion, consensus-folded onto the direct opinion; expectation"
            ),
            "entropy_model": (
                f"direct trust and each concatenated path as Beta(p*{self.beta_weight}+1, (1-p)*{self.beta_weight}+1), "
                "merged by summation; expectation mapped through the [0,1] entropy trust curve"
            ),
        }


@dataclass
class SweepCurve:
    scheme: str
    attack: Attack
    points: list[tuple[int, float]] = field(default_factory=list)
    crossing: int | None = None


def ds_trust_aggregate(cfg: SweepConfig, reports: Sequence[float]) -> float:
    idts = [indirect_trust(cfg.recommender_trust, r) for r in reports]
    return fuse_mass(cfg.direct_trust_of_target, idts, cfg.gamma).m_T


def linear_pool_aggregate(cfg: SweepConfig, reports: Sequence[float]) -> float:
    idts = [indirect_trust(cfg.recommender_trust, r) for r in reports]
    pool_cfg = agg.LinearPoolConfig(cfg.pool_direct_weight, 1.0 - cfg.pool_direct_weight)
    return agg.linear_combined(cfg.direct_trust_of_target, agg.linear_pool(idts), pool_cfg)


def subjective_logic_aggregate(cfg: SweepConfig, reports: Sequence[float]) -> float:
    def opinion(t: float) -> agg.Opinion:
        return agg.Opinion.from_trust(t, cfg.opinion_uncertainty, cfg.opinion_base_rate)

    recommender = opinion(cfg.recommender_trust)
    fused = opinion(cfg.direct_trust_of_target)
    for r in reports:
        fused = agg.consensus(fused, agg.discount(recommender, opinion(r)))
    return agg.opinion_expectation(fused)


def entropy_model_aggregate(cfg: SweepConfig, reports: Sequence[float]) -> float:
    paths = [agg.BetaEvidence.from_probability(cfg.direct_trust_of_target, cfg.beta_weight)]
    for r in reports:
        p = agg.concat_prob(cfg.recommender_trust, r)
        paths.append(agg.BetaEvidence.from_probability(p, cfg.beta_weight))
    merged = agg.multipath_merge(paths)
    return entropy_trust(agg.beta_expectation(merged))


AGGREGATORS: dict[str, Callable[[SweepConfig, Sequence[float]], float]] = {
    "ds_trust": ds_trust_aggregate,
    "linear_pool": linear_pool_aggregate,
    "subjective_logic": subjective_logic_aggregate,
    "entropy_model": entropy_model_aggregate,
}


def crossing_index(points: Iterable[tuple[int, float]], gamma: float, attack: Attack | str) -> int | None:
    """First attacker count at which trust lands on the wrong side of gamma.

    Badmouthing pushes an honest node below gamma; ballot stuffing lifts a
    malicious node to gamma or above.
    """
    attack = Attack(attack)
    for attackers, trust in points:
        if attack is Attack.BADMOUTH and trust < gamma:
            return attackers
        if attack is Attack.BALLOT_STUFF and trust >= gamma:
            return attackers
    return None


def run_sweep(cfg: SweepConfig) -> list[SweepCurve]:
    curves = []
    for scheme in cfg.schemes:
        try:
            aggregate = AGGREGATORS[scheme]
        except KeyError:
            raise ValueError(f"unknown scheme {scheme!r}") from None
        points = [(k, aggregate(cfg, cfg.recommendations(k))) for k in range(cfg.n_recommenders + 1)]
        curves.append(
            SweepCurve(scheme, cfg.attack, points, crossing_index(points, cfg.gamma, cfg.attack))
        )
    return curves


def write_curves(curves: Iterable[SweepCurve], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for curve in curves:
            for attackers, trust in curve.points:
                writer.writerow([curve.scheme, curve.attack.value, attackers, f"{trust:.6f}"])


def read_curves(path: str | Path) -> list[SweepCurve]:
    curves: dict[tuple[str, str], SweepCurve] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["scheme"], row["attack"])
            if key not in curves:
                curves[key] = SweepCurve(row["scheme"], Attack(row["attack"]))
            curves[key].points.append((int(row["attackers"]), float(row["trust"])))
    return list(curves.values())


def config_record(cfg: SweepConfig) -> dict:
    record = asdict(cfg)
    record["attack"] = cfg.attack.value
    record["schemes"] = list(cfg.schemes)
    record["wiring"] = {s: w for s, w in cfg.wiring().items() if s in cfg.schemes}
    return record
