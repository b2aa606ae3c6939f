"""Semimetrics from pair orders, band metrics, and the end-to-end synthesis.

A band metric takes every off-diagonal value in ``[1 - delta, 1 + delta]``
with ``0 < delta < 1/3``; any two such values sum to more than any third, so
the triangle inequality holds whatever the order of the values.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from . import kernels
from .channel import ChannelMatrix, Space, format_value, parse_probability, score_from_channel
from .compare import ComparisonPolicy, rank_matrix
from .errors import DeltaOutOfRange, SemimetricError
from .order import (
    CycleWitness,
    LinearExtension,
    UnorderedPair,
    build_graph,
    find_violation_cycle,
    linear_extension,
)

DEFAULT_DELTA = Fraction(1, 4)
EXHAUSTIVE_TRIANGLE_MAX = 64
TRIANGLE_SAMPLES = 10 ** 6


def parse_delta(delta) -> Union[Fraction, float]:
    try:
        value = parse_probability(delta)
    except ValueError as exc:
        raise DeltaOutOfRange(f"cannot parse delta {delta!r}") from exc
    if not 0 < value < Fraction(1, 3):
        raise DeltaOutOfRange(f"delta must lie in (0, 1/3), got {delta}")
    return value


def _exact(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def _matrix(values) -> np.ndarray:
    rows = [list(r) for r in values]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise SemimetricError("distance matrix must be square")
    if all(_exact(v) for r in rows for v in r):
        arr = np.empty((n, n), dtype=object)
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                arr[i, j] = Fraction(v)
    else:
        arr = np.array(rows, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def _check_semimetric(values: np.ndarray):
    n = len(values)
    for x in range(n):
        if values[x, x] != 0:
            raise SemimetricError(f"diagonal entry ({x},{x}) is {values[x, x]}, expected 0")
        for y in range(x + 1, n):
            if values[x, y] != values[y, x]:
                raise SemimetricError(f"asymmetric at ({x},{y})")
            if not values[x, y] > 0:
                raise SemimetricError(f"non-positive distance at ({x},{y})")


@dataclass(frozen=True)
class Semimetric:
    space: Space
    values: np.ndarray
    provenance: Optional[LinearExtension] = None

    def __post_init__(self):
        values = _matrix(self.values)
        if len(values) != self.space.size:
            raise SemimetricError("matrix size does not match the space")
        _check_semimetric(values)
        object.__setattr__(self, "values", values)

    @property
    def is_exact(self) -> bool:
        return self.values.dtype == object

    def off_diagonal(self) -> list:
        n = self.space.size
        return [self.values[x, y] for x in range(n) for y in range(x + 1, n)]


def semimetric_from_extension(ext: LinearExtension) -> Semimetric:
    n = ext.space.size
    values = [[0] * n for _ in range(n)]
    for p, gv in ext.g.items():
        values[p.lo][p.hi] = values[p.hi][p.lo] = gv
    return Semimetric(ext.space, values, ext)


@dataclass(frozen=True)
class MatchedMetric:
    space: Space
    values: np.ndarray
    delta: Union[Fraction, float]
    provenance: Optional[LinearExtension] = None

    def __post_init__(self):
        delta = parse_delta(self.delta)
        object.__setattr__(self, "delta", delta)
        values = _matrix(self.values)
        if len(values) != self.space.size:
            raise SemimetricError("matrix size does not match the space")
        _check_semimetric(values)
        slack = 0 if isinstance(delta, Fraction) and values.dtype == object else 1e-12
        lo, hi = 1 - delta - slack, 1 + delta + slack
        for v in self.off_diagonal(values):
            if not lo <= v <= hi:
                raise SemimetricError(f"distance {v} outside the band [{lo}, {hi}]")
        object.__setattr__(self, "values", values)
        if self.provenance is not None:
            ext = self.provenance
            d = [values[p.lo, p.hi] for p in ext.order]
            if any(not a < b for a, b in zip(d, d[1:])):
                raise SemimetricError("distances do not follow the provenance pair order")

    def off_diagonal(self, values=None) -> list:
        values = self.values if values is None else values
        n = len(values)
        return [values[x, y] for x in range(n) for y in range(x + 1, n)]

    @property
    def size(self) -> int:
        return self.space.size

    @property
    def is_exact(self) -> bool:
        return self.values.dtype == object

    def distance(self, x: int, y: int):
        return self.values[x, y]

    def ranks(self, cmp: Optional[ComparisonPolicy] = None) -> np.ndarray:
        cmp = cmp or ComparisonPolicy.default_for(self.is_exact)
        return rank_matrix(self.values.tolist(), cmp)

    def to_json(self) -> dict:
        out = {
            "labels": self.space.all_labels(),
            "delta": format_value(self.delta),
            "matrix": [[format_value(v) for v in row] for row in self.values.tolist()],
        }
        if self.provenance is not None:
            out["provenance"] = [p.labels(self.space) for p in self.provenance.order]
        return out

    @classmethod
    def from_json(cls, obj) -> "MatchedMetric":
        matrix = [[parse_probability(v) for v in row] for row in obj["matrix"]]
        labels = obj.get("labels")
        space = Space(len(matrix), tuple(labels) if labels is not None else None)
        provenance = None
        if obj.get("provenance") is not None:
            order = [UnorderedPair.of(space.index(a), space.index(b)) for a, b in obj["provenance"]]
            provenance = LinearExtension.from_order(space, order)
        return cls(space, matrix, parse_probability(obj["delta"]), provenance)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.space.all_labels())
        for row in self.values.tolist():
            writer.writerow([format_value(v) for v in row])
        return buf.getvalue()


def band_metric(e: Semimetric, delta=DEFAULT_DELTA) -> MatchedMetric:
    """Affine, strictly increasing map of the off-diagonal values of ``e`` onto the band."""
    delta = parse_delta(delta)
    exact = e.is_exact and isinstance(delta, Fraction)
    vals = e.off_diagonal()
    lo, hi = min(vals), max(vals)
    n = e.space.size
    one = Fraction(1) if exact else 1.0
    if not exact:
        delta = float(delta)
    d = [[0 * one] * n for _ in range(n)]
    for x in range(n):
        for y in range(x + 1, n):
            v = e.values[x, y] if exact else float(e.values[x, y])
            if lo == hi:
                dv = one
            else:
                dv = one - delta + 2 * delta * (v - lo) / (hi - lo)
            d[x][y] = d[y][x] = dv
    return MatchedMetric(e.space, d, delta, e.provenance)


def integer_scaled(values: np.ndarray) -> Optional[np.ndarray]:
    """Exact matrix times the lcm of its denominators, as int64; ``None`` on overflow."""
    flat = values.ravel().tolist()
    den = math.lcm(*(Fraction(v).denominator for v in flat))
    scaled = [int(Fraction(v) * den) for v in flat]
    if max(abs(v) for v in scaled) >= 2 ** 61:
        return None
    return np.array(scaled, dtype=np.int64).reshape(values.shape)


def triangle_violations(values: np.ndarray, limit: int = 16, seed: int = 0) -> list:
    """Triples ``(x, y, z)`` with ``d(x,z) > d(x,y) + d(y,z)``.

    Exhaustive up to 64 points, otherwise a seeded sample of 10^6 triples.
    Exact matrices are compared as scaled integers when they fit in int64.
    """
    n = len(values)
    tol = 0
    if values.dtype == object:
        scaled = integer_scaled(values)
        if scaled is not None:
            values = scaled
    else:
        tol = 1e-12 * max(1.0, float(np.abs(values).max()))
    if n <= EXHAUSTIVE_TRIANGLE_MAX:
        if values.dtype != object:
            return [tuple(t) for t in kernels.triangle_violations(values, tol, limit).tolist()]
        xs, ys, zs = (a.ravel() for a in np.indices((n, n, n)))
    else:
        rng = np.random.default_rng(seed)
        xs, ys, zs = (rng.integers(0, n, TRIANGLE_SAMPLES) for _ in range(3))
    if values.dtype == object:
        triples = zip(xs.tolist(), ys.tolist(), zs.tolist())
        bad = [(x, y, z) for x, y, z in triples if values[x, z] > values[x, y] + values[y, z]]
    else:
        mask = values[xs, zs] > values[xs, ys] + values[ys, zs] + tol
        bad = list(zip(xs[mask].tolist(), ys[mask].tolist(), zs[mask].tolist()))
    return bad[:limit]


def synthesize(
    ch: ChannelMatrix, delta=DEFAULT_DELTA, cmp: Optional[ComparisonPolicy] = None
) -> Union[MatchedMetric, CycleWitness]:
    """Build a metric matched to ``ch``, or the cycle witness showing none can be built this way."""
    delta = parse_delta(delta)
    f = score_from_channel(ch)
    gr = build_graph(f, cmp)
    witness = find_violation_cycle(gr)
    if witness is not None:
        return witness
    ext = linear_extension(gr)
    return band_metric(semimetric_from_extension(ext), delta)
