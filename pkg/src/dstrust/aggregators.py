"""Classical trust-aggregation schemes used as comparison baselines.

Linear opinion pooling, the concatenation/multipath Beta model with its
entropy trust map, subjective-logic opinions with discounting and
consensus, and the logistic trust map.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

from dstrust.trust import _check_unit, binary_entropy

OPINION_TOLERANCE = 1e-9


class DogmaticConsensusError(ValueError):
    """Consensus of two opinions that both carry zero uncertainty."""


@dataclass(frozen=True)
class LinearPoolConfig:
    direct_weight: float = 0.5
    indirect_weight: float = 0.5
    recommender_weights: Sequence[float] | None = None

    def __post_init__(self) -> None:
        _check_unit("direct_weight", self.direct_weight)
        _check_unit("indirect_weight", self.indirect_weight)
        if abs(self.direct_weight + self.indirect_weight - 1.0) > 1e-12:
            raise ValueError("direct_weight + indirect_weight must equal 1")


def linear_pool(recommendations: Sequence[float], weights: Sequence[float] | None = None) -> float | None:
    """Weighted average of recommendation trusts.

    Weights default to uniform and are normalised to sum to one. An empty
    list yields None (no evidence).
    """
    if not recommendations:
        return None
    if weights is None:
        weights = [1.0] * len(recommendations)
    if len(weights) != len(recommendations):
        raise ValueError("one weight per recommendation is required")
    if any(w < 0 for w in weights):
        raise ValueError("weights must be nonnegative")
    total = math.fsum(weights)
    if total <= 0:
        raise ValueError("weights must not all be zero")
    pooled = math.fsum(w * t for w, t in zip(weights, recommendations)) / total
    return min(max(pooled, min(recommendations)), max(recommendations))


def linear_combined(direct: float, pooled_indirect: float | None, cfg: LinearPoolConfig = LinearPoolConfig()) -> float:
    if pooled_indirect is None:
        return direct
    _check_unit("direct", direct)
    _check_unit("pooled_indirect", pooled_indirect)
    return cfg.direct_weight * direct + cfg.indirect_weight * pooled_indirect


def concat_prob(p_recommender: float, p_target: float) -> float:
    """Trust concatenation along a single recommendation path."""
    _check_unit("p_recommender", p_recommender)
    _check_unit("p_target", p_target)
    return p_recommender * p_target + (1.0 - p_recommender) * (1.0 - p_target)


@dataclass(frozen=True)
class BetaEvidence:
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError(f"Beta parameters must be positive, got ({self.alpha!r}, {self.beta!r})")

    @classmethod
    def from_probability(cls, p: float, weight: float = 10.0) -> BetaEvidence:
        """Beta pseudo-counts whose mean is ``(p*weight + 1) / (weight + 2)``."""
        _check_unit("p", p)
        return cls(alpha=p * weight + 1.0, beta=(1.0 - p) * weight + 1.0)


def multipath_merge(paths: Sequence[BetaEvidence]) -> BetaEvidence | None:
    if not paths:
        return None
    return BetaEvidence(alpha=math.fsum(e.alpha for e in paths), beta=math.fsum(e.beta for e in paths))


def beta_expectation(e: BetaEvidence) -> float:
    return e.alpha / (e.alpha + e.beta)


def entropy_trust_signed(p: float) -> float:
    """Entropy trust on [-1, 1]: 1 - H(p) above one half, H(p) - 1 below."""
    h = binary_entropy(p)
    if p >= 0.5:
        return 1.0 - h
    return h - 1.0


@dataclass(frozen=True)
class Opinion:
    """Subjective-logic opinion (belief, disbelief, uncertainty, base rate)."""

    b: float
    d: float
    u: float
    a: float = 0.5

    def __post_init__(self) -> None:
        for name in ("b", "d", "u", "a"):
            value = getattr(self, name)
            if not -OPINION_TOLERANCE <= value <= 1.0 + OPINION_TOLERANCE or math.isnan(value):
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        if abs(self.b + self.d + self.u - 1.0) > OPINION_TOLERANCE:
            raise ValueError(f"b + d + u must equal 1, got {self.b + self.d + self.u!r}")

    @classmethod
    def from_trust(cls, t: float, uncertainty: float = 0.1, base_rate: float = 0.5) -> Opinion:
        """Split ``1 - uncertainty`` between belief and disbelief in proportion t : 1 - t."""
        _check_unit("t", t)
        _check_unit("uncertainty", uncertainty)
        certain = 1.0 - uncertainty
        return cls(b=t * certain, d=(1.0 - t) * certain, u=uncertainty, a=base_rate)


def opinion_expectation(o: Opinion) -> float:
    return o.b + o.a * o.u


def discount(o_recommender: Opinion, o_target: Opinion) -> Opinion:
    """Transitive discounting of a target opinion through a recommender."""
    b1, d1, u1 = o_recommender.b, o_recommender.d, o_recommender.u
    return Opinion(
        b=b1 * o_target.b,
        d=b1 * o_target.d,
        u=d1 + u1 + b1 * o_target.u,
        a=o_target.a,
    )


def consensus(o1: Opinion, o2: Opinion) -> Opinion:
    """Fuse two independent opinions about the same target.

    Raises:
        DogmaticConsensusError: if both opinions have zero uncertainty.
    """
    kappa = o1.u + o2.u - o1.u * o2.u
    if kappa <= OPINION_TOLERANCE:
        raise DogmaticConsensusError("consensus of two dogmatic opinions is undefined")
    return Opinion(
        b=(o1.b * o2.u + o2.b * o1.u) / kappa,
        d=(o1.d * o2.u + o2.d * o1.u) / kappa,
        u=(o1.u * o2.u) / kappa,
        a=o1.a,
    )


@dataclass(frozen=True)
class LogitModel:
    coefficients: Sequence[float]
    features: Sequence[float] = field(default=())

    def __post_init__(self) -> None:
        if len(self.coefficients) != len(self.features):
            raise ValueError("coefficients and features must have the same length")


def logit_map(model: LogitModel) -> float:
    z = math.fsum(x * b for x, b in zip(model.features, model.coefficients))
    # branch keeps exp() from overflowing at large |z|
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)
