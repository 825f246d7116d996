"""Static node placement with unit-disk connectivity."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Topology:
    positions: tuple[tuple[float, float], ...]
    range_m: float
    neighbors: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.range_m < 0:
            raise ValueError("range_m must be nonnegative")
        n = len(self.positions)
        adjacency: list[list[int]] = [[] for _ in range(n)]
        # small epsilon so lattice points exactly at range stay connected
        limit = self.range_m + 1e-9
        for i in range(n):
            xi, yi = self.positions[i]
            for j in range(i + 1, n):
                xj, yj = self.positions[j]
                if math.hypot(xi - xj, yi - yj) <= limit:
                    adjacency[i].append(j)
                    adjacency[j].append(i)
        object.__setattr__(self, "neighbors", tuple(tuple(sorted(a)) for a in adjacency))

    @classmethod
    def from_positions(cls, positions: Sequence[tuple[float, float]], range_m: float) -> Topology:
        return cls(tuple((float(x), float(y)) for x, y in positions), float(range_m))

    def __len__(self) -> int:
        return len(self.positions)

    def are_neighbors(self, a: int, b: int) -> bool:
        return b in self.neighbors[a]

    def edges(self) -> set[tuple[int, int]]:
        return {(i, j) for i, nbrs in enumerate(self.neighbors) for j in nbrs if i < j}


def build_grid(rows: int, cols: int, spacing: float, range_m: float = 250.0) -> Topology:
    """Lattice of ``rows * cols`` nodes; node ``r * cols + c`` sits at (c, r) * spacing."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be at least 1")
    positions = [(c * spacing, r * spacing) for r in range(rows) for c in range(cols)]
    return Topology.from_positions(positions, range_m)


def build_line(n: int, spacing: float, range_m: float = 250.0) -> Topology:
    return build_grid(1, n, spacing, range_m)
