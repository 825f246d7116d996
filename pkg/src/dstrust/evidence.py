"""Dempster-Shafer evidence over the two-state frame {T, notT}.

The power set has four members: the empty set, {T}, {notT} and the whole
frame {T, notT}, which carries uncertainty. Mass on the empty set is
always zero, so a mass function is stored as three numbers.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum

from dstrust.trust import _check_unit

MASS_TOLERANCE = 1e-9
CONFLICT_GUARD = 1e-12


class TotalConflictError(ValueError):
    """Raised when two mass functions share no compatible focal set."""


class Focal(frozenset, Enum):
    """Non-empty subsets of the frame of discernment."""

    TRUSTED = frozenset({"T"})
    UNTRUSTED = frozenset({"notT"})
    EITHER = frozenset({"T", "notT"})


@dataclass(frozen=True)
class MassFunction:
    """Basic probability assignment on {T}, {notT} and {T, notT}."""

    m_T: float = 0.0
    m_notT: float = 0.0
    m_uncertain: float = 0.0

    def __post_init__(self) -> None:
        for name in ("m_T", "m_notT", "m_uncertain"):
            value = getattr(self, name)
            if not -MASS_TOLERANCE <= value <= 1.0 + MASS_TOLERANCE or math.isnan(value):
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        total = self.m_T + self.m_notT + self.m_uncertain
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise ValueError(f"masses must sum to 1, got {total!r}")

    @classmethod
    def vacuous(cls) -> MassFunction:
        return cls(m_uncertain=1.0)

    def __getitem__(self, focal: Focal) -> float:
        if focal is Focal.TRUSTED:
            return self.m_T
        if focal is Focal.UNTRUSTED:
            return self.m_notT
        return self.m_uncertain

    def items(self) -> list[tuple[Focal, float]]:
        return [(f, self[f]) for f in Focal]

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.m_T, self.m_notT, self.m_uncertain)


def _as_focal(subset: Focal | Iterable[str]) -> frozenset:
    subset = frozenset(subset)
    if not subset <= Focal.EITHER.value:
        raise ValueError(f"unknown hypotheses in {set(subset)!r}")
    return subset


def dissimilarity(a: float, b: float) -> float:
    """Normalised absolute difference |a - b| / (|a| + |b|); zero when both are zero."""
    _check_unit("a", a)
    _check_unit("b", b)
    denominator = abs(a) + abs(b)
    if denominator == 0.0:
        return 0.0
    return abs(a - b) / denominator


def direct_bpa(direct_trust: float, gamma: float) -> MassFunction:
    """Mass function for a node's own direct trust.

    At or above the threshold the trust itself is belief in {T}; below it,
    1 - trust is disbelief. The remainder goes to uncertainty either way.
    """
    _check_unit("direct_trust", direct_trust)
    if direct_trust >= gamma:
        return MassFunction(m_T=direct_trust, m_uncertain=1.0 - direct_trust)
    return MassFunction(m_notT=1.0 - direct_trust, m_uncertain=direct_trust)


def indirect_bpa(idt: float, dissim: float, gamma: float) -> MassFunction:
    """Mass function for one recommendation; its conflict becomes uncertainty."""
    _check_unit("idt", idt)
    _check_unit("dissim", dissim)
    if idt >= gamma:
        return MassFunction(m_T=1.0 - dissim, m_uncertain=dissim)
    return MassFunction(m_notT=1.0 - dissim, m_uncertain=dissim)


def conflict(m1: MassFunction, m2: MassFunction) -> float:
    return m1.m_T * m2.m_notT + m1.m_notT * m2.m_T


def combine(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Dempster's rule of combination.

    Raises:
        TotalConflictError: when 1 - K falls below ``CONFLICT_GUARD``.
    """
    k = conflict(m1, m2)
    norm = 1.0 - k
    if norm < CONFLICT_GUARD:
        raise TotalConflictError(f"conflict K={k!r} leaves nothing to normalise")
    t = m1.m_T * m2.m_T + m1.m_T * m2.m_uncertain + m1.m_uncertain * m2.m_T
    n = m1.m_notT * m2.m_notT + m1.m_notT * m2.m_uncertain + m1.m_uncertain * m2.m_notT
    u = m1.m_uncertain * m2.m_uncertain
    return MassFunction(m_T=t / norm, m_notT=n / norm, m_uncertain=u / norm)


def belief(m: MassFunction, subset: Focal | Iterable[str]) -> float:
    """Total mass committed to non-empty subsets of ``subset``."""
    target = _as_focal(subset)
    return math.fsum(mass for focal, mass in m.items() if focal.value <= target)


def plausibility(m: MassFunction, subset: Focal | Iterable[str]) -> float:
    """Total mass on focal sets that intersect ``subset``."""
    target = _as_focal(subset)
    return math.fsum(mass for focal, mass in m.items() if focal.value & target)


def pignistic(m: MassFunction) -> float:
    return m.m_T + 0.5 * m.m_uncertain


@dataclass(frozen=True)
class FusionInput:
    direct_trust: float
    recommendations: Sequence[tuple[int, float]] = ()
    gamma: float = 0.5

    def __post_init__(self) -> None:
        _check_unit("direct_trust", self.direct_trust)
        for _, idt in self.recommendations:
            _check_unit("idt", idt)


def fuse_mass(direct_trust: float, idts: Iterable[float], gamma: float) -> MassFunction:
    """Fold every recommendation into the direct-trust mass function in order."""
    fused = direct_bpa(direct_trust, gamma)
    for idt in idts:
        fused = combine(fused, indirect_bpa(idt, dissimilarity(direct_trust, idt), gamma))
    return fused


def fuse(fusion: FusionInput, mode: str = "belief") -> float:
    """Combined trust of the target.

    ``mode="belief"`` reports belief in {T}; ``mode="pignistic"`` also
    credits half the uncertainty. With no recommendations the result is the
    direct mass function's own value, which equals the direct trust whenever
    it clears the threshold.
    """
    fused = fuse_mass(fusion.direct_trust, (idt for _, idt in fusion.recommendations), fusion.gamma)
    if mode == "belief":
        return fused.m_T
    if mode == "pignistic":
        return pignistic(fused)
    raise ValueError(f"unknown fusion mode {mode!r}")
