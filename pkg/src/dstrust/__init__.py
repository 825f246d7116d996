"""Dempster-Shafer trust fusion for wireless mesh networks."""

from dstrust.evidence import FusionInput, MassFunction, combine, fuse
from dstrust.trust import TrustConfig, TrustRecord, entropy_trust

__all__ = [
    "FusionInput",
    "MassFunction",
    "TrustConfig",
    "TrustRecord",
    "combine",
    "entropy_trust",
    "fuse",
]

__version__ = "0.1.0"
