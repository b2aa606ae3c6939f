"""Checks of compatibility and matchedness, plus the strong-existence oracle."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterator, Optional, Sequence

from . import kernels
from .channel import ChannelMatrix, PartialScore, Space, format_value
from .compare import ComparisonPolicy, rank_matrix
from .errors import OracleScaleExceeded, SpaceMismatch
from .metric import DEFAULT_DELTA, MatchedMetric, parse_delta
from .order import UnorderedPair, all_pairs

STRONG_ORACLE_MAX_PAIRS = 8


def _metric_ranks(d: MatchedMetric, cmp: Optional[ComparisonPolicy]):
    if cmp is not None and cmp.mode == "float" and not d.is_exact:
        return d.ranks(cmp)
    return d.ranks()


@dataclass(frozen=True)
class CompatibilityViolation:
    """``f(x,y) > f(x,z)`` but not ``d(x,y) < d(x,z)``."""

    x: int
    y: int
    z: int
    f_xy: object
    f_xz: object
    d_xy: object
    d_xz: object

    def describe(self, space: Space) -> str:
        x, y, z = (space.label(i) for i in (self.x, self.y, self.z))
        return (
            f"f({x},{y})={self.f_xy} > f({x},{z})={self.f_xz} "
            f"but d({x},{y})={self.d_xy} >= d({x},{z})={self.d_xz}"
        )


def verify_compatibility(
    f: PartialScore, d: MatchedMetric, cmp: Optional[ComparisonPolicy] = None
) -> list:
    """Every triple where the score strictly orders two pairs and the metric does not follow.

    An empty list means the metric is compatible with the score.
    """
    if not f.space.compatible(d.space):
        raise SpaceMismatch("score and metric live on different spaces")
    cmp = cmp or ComparisonPolicy.default_for(f.is_exact)
    rank_f = rank_matrix(f.dense(), cmp)
    rank_d = _metric_ranks(d, cmp)
    bad = kernels.compat_violations(rank_f, rank_d).tolist()
    return [
        CompatibilityViolation(x, y, z, f[x, y], f[x, z], d.values[x, y], d.values[x, z])
        for x, y, z in bad
    ]


class MatchStatus(str, enum.Enum):
    STRONG = "strong-matched"
    WEAK = "weak-matched"
    NOT = "not-matched"


@dataclass(frozen=True)
class PointMatch:
    x: int
    argmin_d: frozenset
    argmax_p: frozenset

    @property
    def verdict(self) -> str:
        if self.argmin_d == self.argmax_p:
            return "equal"
        if self.argmin_d <= self.argmax_p:
            return "subset"
        return "violation"


@dataclass(frozen=True)
class MatchReport:
    space: Space
    per_x: tuple
    overall: MatchStatus
    counterexamples: tuple

    @property
    def is_weak(self) -> bool:
        return self.overall in (MatchStatus.STRONG, MatchStatus.WEAK)

    @property
    def is_strong(self) -> bool:
        return self.overall is MatchStatus.STRONG

    def to_json(self) -> dict:
        lab = self.space.label
        return {
            "overall": self.overall.value,
            "per_x": [
                {
                    "x": lab(p.x),
                    "argmin_d": sorted(lab(y) for y in p.argmin_d),
                    "argmax_p": sorted(lab(y) for y in p.argmax_p),
                    "verdict": p.verdict,
                }
                for p in self.per_x
            ],
            "counterexamples": [
                {"x": lab(x), "y": lab(y), "d": format_value(dv), "p": format_value(pv)}
                for x, y, dv, pv in self.counterexamples
            ],
        }

    def render_table(self) -> str:
        lab = self.space.label
        rows = [("x", "argmin_d", "argmax_P", "verdict")]
        for p in self.per_x:
            rows.append((
                lab(p.x),
                "{" + ",".join(sorted(lab(y) for y in p.argmin_d)) + "}",
                "{" + ",".join(sorted(lab(y) for y in p.argmax_p)) + "}",
                p.verdict,
            ))
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = [" | ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
        lines.insert(1, "-+-".join("-" * w for w in widths))
        lines.append(f"overall: {self.overall.value}")
        return "\n".join(lines)


def _extreme_set(ranks_row: Sequence[int], x: int, pick_max: bool) -> frozenset:
    cols = [y for y in range(len(ranks_row)) if y != x and ranks_row[y] >= 0]
    target = (max if pick_max else min)(ranks_row[y] for y in cols)
    return frozenset(y for y in cols if ranks_row[y] == target)


def verify_matched(
    ch: ChannelMatrix, d: MatchedMetric, cmp: Optional[ComparisonPolicy] = None
) -> MatchReport:
    """Per word x, compare argmin over y != x of d(x,y) with argmax of Pr(x|y)."""
    if not ch.space.compatible(d.space):
        raise SpaceMismatch("channel and metric live on different spaces")
    cmp = cmp or ComparisonPolicy.default_for(ch.is_exact)
    n = ch.size
    rank_p = rank_matrix([[None if x == y else ch.entries[x][y] for y in range(n)] for x in range(n)], cmp)
    rank_d = _metric_ranks(d, cmp)
    per_x, bad = [], []
    for x in range(n):
        pm = PointMatch(x, _extreme_set(rank_d[x], x, False), _extreme_set(rank_p[x], x, True))
        per_x.append(pm)
        for y in sorted(pm.argmin_d - pm.argmax_p):
            bad.append((x, y, d.values[x, y], ch.entries[x][y]))
    if all(p.verdict == "equal" for p in per_x):
        overall = MatchStatus.STRONG
    elif not bad:
        overall = MatchStatus.WEAK
    else:
        overall = MatchStatus.NOT
    return MatchReport(ch.space, tuple(per_x), overall, tuple(bad))


@dataclass(frozen=True)
class WeakOrdering:
    """Ordered partition of all pairs into tiers; tier 0 holds the closest pairs."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(tuple(b) for b in self.blocks)
        if any(not b for b in blocks):
            raise ValueError("tiers must be nonempty")
        flat = [p for b in blocks for p in b]
        if len(flat) != len(set(flat)):
            raise ValueError("tiers must be disjoint")
        object.__setattr__(self, "blocks", blocks)

    def covers(self, n: int) -> bool:
        return sorted(p for b in self.blocks for p in b) == all_pairs(n)

    def tier(self, pair: UnorderedPair) -> int:
        for t, b in enumerate(self.blocks):
            if pair in b:
                return t
        raise KeyError(pair)

    def realize(self, space: Space, delta=DEFAULT_DELTA) -> MatchedMetric:
        """Band metric with tier ``t`` of ``T`` at ``1 - delta + 2 delta t / (T - 1)``."""
        if not self.covers(space.size):
            raise ValueError("weak ordering does not cover all pairs of the space")
        delta = parse_delta(delta)
        T = len(self.blocks)
        n = space.size
        one = Fraction(1) if isinstance(delta, Fraction) else 1.0
        values = [[0 * one] * n for _ in range(n)]
        for t, b in enumerate(self.blocks):
            v = one if T == 1 else one - delta + 2 * delta * t / (T - 1)
            for p in b:
                values[p.lo][p.hi] = values[p.hi][p.lo] = v
        return MatchedMetric(space, values, delta)


def weak_orderings(items: Sequence) -> Iterator[tuple]:
    """All ordered set partitions of ``items``, deterministic order."""
    items = tuple(items)
    if not items:
        yield ()
        return
    for k in range(1, len(items) + 1):
        for first in combinations(items, k):
            rest = tuple(i for i in items if i not in first)
            for tail in weak_orderings(rest):
                yield (first,) + tail


def strong_exists_bruteforce(
    ch: ChannelMatrix,
    delta=DEFAULT_DELTA,
    cmp: Optional[ComparisonPolicy] = None,
    allow_large: bool = False,
):
    """Search every weak ordering of the pairs for a strongly matched band metric.

    Returns ``(exists, witness)`` where ``witness`` is the first successful
    :class:`WeakOrdering` or ``None``.
    """
    n = ch.size
    if comb(n, 2) > STRONG_ORACLE_MAX_PAIRS and not allow_large:
        raise OracleScaleExceeded(f"C({n},2) pairs exceeds the oracle limit of {STRONG_ORACLE_MAX_PAIRS}")
    for blocks in weak_orderings(all_pairs(n)):
        wo = WeakOrdering(blocks)
        if verify_matched(ch, wo.realize(ch.space, delta), cmp).is_strong:
            return True, wo
    return False, None
