"""Direct trust from watchdog observations.

A node counts the packets it hands to a neighbor for forwarding and the
forwardings it overhears. Each monitoring period the ratio becomes a
forwarding probability, the probability is mapped through a binary-entropy
curve onto [0, 1], and the result is exponentially smoothed against the
previous value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

BOOTSTRAP_TRUST = 0.5


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0 or math.isnan(value):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


def clamp_unit(value: float) -> float:
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class TrustConfig:
    """Trust-formation parameters shared by every node.

    Attributes:
        gamma: detection threshold; trust strictly below it marks a node untrusted.
        period: monitoring period in seconds.
        alpha: smoothing weight on the newest observation.
        recommender_weighting: scale each recommendation by trust in its sender.
    """

    gamma: float = 0.5
    period: float = 20.0
    alpha: float = 0.5
    recommender_weighting: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma!r}")
        _check_unit("alpha", self.alpha)
        if not self.period > 0:
            raise ValueError(f"period must be positive, got {self.period!r}")


@dataclass
class TrustRecord:
    """Per-neighbor watchdog counters and smoothed direct trust."""

    subject: int
    packets_sent: int = 0
    packets_overheard: int = 0
    smoothed_trust: float = BOOTSTRAP_TRUST
    last_update: float = 0.0
    observed: bool = False

    def __post_init__(self) -> None:
        if self.packets_sent < 0 or self.packets_overheard < 0:
            raise ValueError("packet counters must be nonnegative")
        if self.packets_overheard > self.packets_sent:
            raise ValueError("packets_overheard cannot exceed packets_sent")
        _check_unit("smoothed_trust", self.smoothed_trust)

    def record(self, overheard: bool) -> None:
        self.packets_sent += 1
        if overheard:
            self.packets_overheard += 1

    def preview(self, alpha: float) -> float | None:
        """Trust this record would hold if the period closed now.

        Returns None when the subject has never been observed and nothing
        is pending, i.e. there is no record to report.
        """
        p_f = forwarding_probability(self.packets_sent, self.packets_overheard)
        if p_f is None:
            return self.smoothed_trust if self.observed else None
        return clamp_unit(smooth(entropy_trust(p_f), self.smoothed_trust, alpha))

    def close_period(self, alpha: float, now: float) -> float | None:
        """Fold this period's counters into the smoothed trust and reset them.

        With no traffic in the period the smoothed value is carried forward
        and None is returned.
        """
        p_f = forwarding_probability(self.packets_sent, self.packets_overheard)
        self.packets_sent = 0
        self.packets_overheard = 0
        if p_f is None:
            return None
        self.smoothed_trust = clamp_unit(smooth(entropy_trust(p_f), self.smoothed_trust, alpha))
        self.last_update = now
        self.observed = True
        return self.smoothed_trust


def forwarding_probability(sent: int, overheard: int) -> float | None:
    """Fraction of handed-over packets seen being retransmitted.

    None signals that nothing was sent, so there is no evidence either way.
    """
    if sent < 0 or overheard < 0:
        raise ValueError("packet counters must be nonnegative")
    if overheard > sent:
        raise ValueError(f"overheard ({overheard}) exceeds sent ({sent})")
    if sent == 0:
        return None
    return overheard / sent


def binary_entropy(p: float) -> float:
    """Base-2 binary entropy, with H(0) = H(1) = 0."""
    _check_unit("p", p)
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def entropy_trust(p_f: float) -> float:
    """Map a forwarding probability onto [0, 1] through binary entropy.

    The upper branch is 1 - H/2 and the lower branch H/2, so the map is
    monotone, passes through (0.5, 0.5) and satisfies
    ``entropy_trust(p) + entropy_trust(1 - p) == 1``.
    """
    h = binary_entropy(p_f)
    if p_f >= 0.5:
        return 1.0 - 0.5 * h
    return 0.5 * h


def smooth(raw: float, previous: float, alpha: float) -> float:
    _check_unit("raw", raw)
    _check_unit("previous", previous)
    _check_unit("alpha", alpha)
    return alpha * raw + (1.0 - alpha) * previous


def indirect_trust(trust_in_recommender: float, recommended_trust: float) -> float:
    """Discount a recommendation by the requester's trust in its sender."""
    _check_unit("trust_in_recommender", trust_in_recommender)
    _check_unit("recommended_trust", recommended_trust)
    return trust_in_recommender * recommended_trust
