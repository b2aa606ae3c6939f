"""Comparison policies: exact comparison or epsilon clustering for floats.

Every ordering decision in the package goes through :func:`dense_ranks`, which
turns one row of values into integer ranks (larger value, larger rank). Kernels
only ever see those integers, so exact and float inputs share one code path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np


MISSING = -1


@dataclass(frozen=True)
class ComparisonPolicy:
    mode: str = "exact"
    epsilon: float = 1e-12

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise ValueError(f"unknown comparison mode {self.mode!r}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    @classmethod
    def exact(cls) -> "ComparisonPolicy":
        return cls("exact")

    @classmethod
    def floating(cls, epsilon: float = 1e-12) -> "ComparisonPolicy":
        return cls("float", epsilon)

    @classmethod
    def default_for(cls, is_exact: bool) -> "ComparisonPolicy":
        return cls.exact() if is_exact else cls.floating()

    def close(self, u: float, v: float) -> bool:
        if u == v:
            return True
        if math.isinf(u) or math.isinf(v):
            return False
        return abs(u - v) <= self.epsilon * max(1.0, abs(u), abs(v))


def dense_ranks(values: Sequence, policy: ComparisonPolicy) -> list[int]:
    """Rank ``values`` densely: equal values share a rank, ranks start at 0.

    In float mode values are sorted and consecutive values within epsilon are
    chained into one cluster, which keeps equality transitive inside the row.
    """
    if not values:
        return []
    if policy.mode == "exact":
        levels = {v: i for i, v in enumerate(sorted(set(values)))}
        return [levels[v] for v in values]
    floats = [float(v) for v in values]
    order = sorted(range(len(floats)), key=floats.__getitem__)
    ranks = [0] * len(floats)
    level = 0
    prev = floats[order[0]]
    for i in order:
        if not policy.close(prev, floats[i]):
            level += 1
        ranks[i] = level
        prev = floats[i]
    return ranks


def rank_matrix(rows: Sequence[Sequence[Optional[object]]], policy: ComparisonPolicy) -> np.ndarray:
    """Row-wise dense ranks of a square table; ``None`` and the diagonal map to -1."""
    n = len(rows)
    out = np.full((n, n), MISSING, dtype=np.int64)
    for x, row in enumerate(rows):
        cols = [y for y in range(n) if y != x and row[y] is not None]
        for y, r in zip(cols, dense_ranks([row[y] for y in cols], policy)):
            out[x, y] = r
    return out


def is_exact_value(v) -> bool:
    return isinstance(v, (Fraction, int)) and not isinstance(v, bool)
