"""Finite channels: explicit matrices and products of binary symbol channels.

``entries[x][y]`` is always Pr(x | y), the probability of receiving ``x`` when
``y`` was sent. Probabilities are kept as :class:`fractions.Fraction` whenever
the inputs are rational; floats are only used when a float is supplied.
"""
from __future__ import annotations

import enum
import json
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import (
    ChannelError,
    KindMismatch,
    ParameterOutOfRange,
    SpaceTooLarge,
    ZeroProbabilityFactor,
)

Prob = Union[Fraction, float]

DEFAULT_SPACE_CAP = 2 ** 12
HALF = Fraction(1, 2)
FLOAT_SUM_TOL = 1e-9


def parse_probability(value) -> Prob:
    """Coerce ints, Fractions and strings like ``"1/10"`` or ``"0.25"`` to Fraction.

    Floats stay floats; that is what opts a channel into float mode.
    """
    if isinstance(value, bool):
        raise ParameterOutOfRange(f"not a probability: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if math.isnan(value):
            raise ParameterOutOfRange("probability is NaN")
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParameterOutOfRange(f"cannot parse probability {value!r}") from exc
    raise ParameterOutOfRange(f"not a probability: {value!r}")


def format_value(value) -> Union[str, float]:
    """JSON form of a value: exact rationals as ``"a/b"`` strings, floats as numbers."""
    if isinstance(value, (Fraction, int)):
        return str(Fraction(value))
    return float(value)


def default_space_cap() -> int:
    env = os.environ.get("METRIC_FORGE_MAX_SPACE")
    return int(env) if env else DEFAULT_SPACE_CAP


@dataclass(frozen=True)
class Space:
    size: int
    labels: Optional[tuple] = None

    def __post_init__(self):
        if self.size < 2:
            raise ChannelError(f"space needs at least 2 elements, got {self.size}")
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != self.size or len(set(labels)) != self.size:
                raise ChannelError("labels must be distinct and match the space size")
            object.__setattr__(self, "labels", labels)

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    def all_labels(self) -> list:
        return [self.label(i) for i in range(self.size)]

    def index(self, label) -> int:
        if self.labels is not None and str(label) in self.labels:
            return self.labels.index(str(label))
        i = int(label)
        if not 0 <= i < self.size:
            raise KeyError(label)
        return i

    def compatible(self, other: "Space") -> bool:
        return self.size == other.size and self.all_labels() == other.all_labels()


class StochasticAxis(str, enum.Enum):
    SENT_COLUMN = "sent-column"
    RECEIVED_ROW = "received-row"
    NONE = "none"


@dataclass(frozen=True)
class ChannelMatrix:
    space: Space
    entries: tuple
    stochastic_axis: StochasticAxis = StochasticAxis.SENT_COLUMN
    unnormalized: bool = field(default=False, init=False)

    def __post_init__(self):
        axis = StochasticAxis(self.stochastic_axis)
        object.__setattr__(self, "stochastic_axis", axis)
        n = self.space.size
        rows = [list(map(parse_probability, row)) for row in self.entries]
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ChannelError(f"matrix must be {n}x{n}")
        if any(isinstance(v, float) for r in rows for v in r):
            rows = [[float(v) for v in r] for r in rows]
        for r in rows:
            for v in r:
                if not 0 <= v <= 1:
                    raise ChannelError(f"entry {v} outside [0, 1]")
        object.__setattr__(self, "entries", tuple(tuple(r) for r in rows))
        if axis is StochasticAxis.SENT_COLUMN:
            sums = [sum(rows[x][y] for x in range(n)) for y in range(n)]
        elif axis is StochasticAxis.RECEIVED_ROW:
            sums = [sum(r) for r in rows]
        else:
            object.__setattr__(self, "unnormalized", True)
            return
        for i, s in enumerate(sums):
            ok = s == 1 if self.is_exact else abs(s - 1) <= FLOAT_SUM_TOL
            if not ok:
                raise ChannelError(f"{axis.value} sum #{i} is {s}, expected 1")

    @classmethod
    def from_rows(cls, rows, stochastic_axis="sent-column", labels=None) -> "ChannelMatrix":
        rows = [list(r) for r in rows]
        space = Space(len(rows), tuple(labels) if labels is not None else None)
        return cls(space, tuple(tuple(r) for r in rows), StochasticAxis(stochastic_axis))

    @property
    def size(self) -> int:
        return self.space.size

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for r in self.entries for v in r)

    def prob(self, received: int, sent: int) -> Prob:
        return self.entries[received][sent]


@dataclass(frozen=True)
class SymbolChannel:
    """Binary symbol channel. ``p01`` = Pr(1 | 0 sent), ``p10`` = Pr(0 | 1 sent)."""

    p01: Prob
    p10: Prob

    def __post_init__(self):
        for name in ("p01", "p10"):
            v = parse_probability(getattr(self, name))
            if not 0 <= v < HALF:
                raise ParameterOutOfRange(f"{name}={v} must lie in [0, 1/2)")
            object.__setattr__(self, name, v)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.p01, Fraction) and isinstance(self.p10, Fraction)

    @property
    def kind(self) -> str:
        if self.p01 == 0 or self.p10 == 0:
            return "Z" if self.p01 != self.p10 else "noiseless"
        return "BSC" if self.p01 == self.p10 else "BAC"

    def prob(self, received: int, sent: int) -> Prob:
        if sent == 0:
            return self.p01 if received == 1 else 1 - self.p01
        return self.p10 if received == 0 else 1 - self.p10

    def matrix(self) -> list:
        return [[self.prob(r, s) for s in (0, 1)] for r in (0, 1)]


def make_channel(kind: str, p, q=None) -> SymbolChannel:
    """Validated symbol channel of the given kind; ``p`` is Pr(1|0), ``q`` is Pr(0|1)."""
    kind = kind.upper()
    p = parse_probability(p)
    q = p if q is None and kind == "BSC" else parse_probability(q)
    for v in (p, q):
        if not 0 <= v < HALF:
            raise ParameterOutOfRange(f"flip probability {v} must lie in [0, 1/2)")
    if kind == "BAC":
        if p == 0 or q == 0:
            raise KindMismatch("BAC needs both flip probabilities positive (use Z)")
        if p == q:
            raise KindMismatch("BAC needs p != q (use BSC)")
    elif kind == "BSC":
        if p != q:
            raise KindMismatch(f"BSC needs p == q, got {p} and {q}")
        if p == 0:
            raise ParameterOutOfRange("BSC flip probability must be positive")
    elif kind == "Z":
        if (p == 0) == (q == 0):
            raise KindMismatch("Z channel needs exactly one zero flip probability")
    else:
        raise KindMismatch(f"unknown channel kind {kind!r}")
    return SymbolChannel(p, q)


def word_label(word: int, length: int) -> str:
    return format(word, f"0{length}b")


def word_bit(word: int, j: int, length: int) -> int:
    return (word >> (length - 1 - j)) & 1


@dataclass(frozen=True)
class ProductChannelSpec:
    symbol: SymbolChannel
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ParameterOutOfRange("codeword length must be at least 1")

    @property
    def size(self) -> int:
        return 2 ** self.length

    def space(self) -> Space:
        return Space(self.size, tuple(word_label(w, self.length) for w in range(self.size)))

    def word(self, w) -> int:
        if isinstance(w, str):
            if len(w) != self.length or set(w) - {"0", "1"}:
                raise ParameterOutOfRange(f"{w!r} is not a binary word of length {self.length}")
            return int(w, 2)
        w = int(w)
        if not 0 <= w < self.size:
            raise ParameterOutOfRange(f"codeword {w} out of range")
        return w

    def prob(self, received, sent) -> Prob:
        x, y = self.word(received), self.word(sent)
        out = Fraction(1) if self.symbol.is_exact else 1.0
        for j in range(self.length):
            out *= self.symbol.prob(word_bit(x, j, self.length), word_bit(y, j, self.length))
        return out


def expand_product(spec: ProductChannelSpec, cap: Optional[int] = None) -> ChannelMatrix:
    """Materialize the 2^m x 2^m product channel as an iterated Kronecker product."""
    cap = default_space_cap() if cap is None else cap
    if spec.size > cap:
        raise SpaceTooLarge(f"2^{spec.length} = {spec.size} words exceeds the cap of {cap}")
    base = spec.symbol.matrix()
    rows = [[Fraction(1) if spec.symbol.is_exact else 1.0]]
    for _ in range(spec.length):
        rows = [
            [a * b for a in row for b in base[r]]
            for row in rows
            for r in (0, 1)
        ]
    return ChannelMatrix(spec.space(), tuple(tuple(r) for r in rows), StochasticAxis.SENT_COLUMN)


@dataclass(frozen=True)
class PartialScore:
    """Score on ordered pairs ``(x, y)``, ``x != y``; absent keys are outside the domain."""

    space: Space
    values: Mapping

    def __post_init__(self):
        n = self.space.size
        clean = {}
        for (x, y), v in self.values.items():
            if x == y:
                raise ValueError(f"diagonal pair ({x}, {y}) in score domain")
            if not (0 <= x < n and 0 <= y < n):
                raise ValueError(f"pair ({x}, {y}) outside the space")
            if isinstance(v, float) and math.isnan(v):
                raise ValueError(f"NaN score at ({x}, {y})")
            clean[(x, y)] = v
        object.__setattr__(self, "values", MappingProxyType(clean))

    def __getitem__(self, key):
        return self.values[key]

    def __contains__(self, key) -> bool:
        return key in self.values

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, (Fraction, int)) for v in self.values.values())

    def dense(self) -> list:
        n = self.space.size
        rows = [[None] * n for _ in range(n)]
        for (x, y), v in self.values.items():
            rows[x][y] = v
        return rows


def score_from_channel(ch: ChannelMatrix) -> PartialScore:
    n = ch.size
    return PartialScore(
        ch.space,
        {(x, y): ch.entries[x][y] for x in range(n) for y in range(n) if x != y},
    )


@dataclass(frozen=True)
class LogSum:
    """Exact sum of logarithms of symbol transition probabilities.

    ``exponents`` maps a transition ``(received, sent)`` to its net
    multiplicity after cancellation; the represented value is
    ``sum(k * log Pr(r|s))``.
    """

    symbol: SymbolChannel
    exponents: tuple

    def product(self) -> Prob:
        out = Fraction(1) if self.symbol.is_exact else 1.0
        for (r, s), k in self.exponents:
            out *= self.symbol.prob(r, s) ** k
        return out

    def is_zero(self) -> bool:
        return self.product() == 1

    def __float__(self) -> float:
        return float(sum(k * math.log(self.symbol.prob(r, s)) for (r, s), k in self.exponents))


def cyclic_sum(
    spec: ProductChannelSpec, seq: Sequence, j: int, exact: Optional[bool] = None
) -> Union[LogSum, float]:
    """Sum over the cycle of log Pr(x_i(j)|x_{i-1}(j)) - log Pr(x_i(j)|x_{i+1}(j)).

    Indices along the sequence wrap modulo its length. Exact mode returns a
    :class:`LogSum` ledger; float mode returns a float.
    """
    words = [spec.word(w) for w in seq]
    n = len(words)
    if n < 2:
        raise ValueError("cyclic sequence needs at least 2 codewords")
    if not 0 <= j < spec.length:
        raise ValueError(f"position {j} outside 0..{spec.length - 1}")
    exact = spec.symbol.is_exact if exact is None else exact
    if exact and not spec.symbol.is_exact:
        raise ValueError("exact cyclic sum needs rational symbol probabilities")
    bits = [word_bit(w, j, spec.length) for w in words]
    ledger = Counter()
    for i in range(n):
        ledger[(bits[i], bits[i - 1])] += 1
        ledger[(bits[i], bits[(i + 1) % n])] -= 1
    for r, s in ledger:
        if spec.symbol.prob(r, s) == 0:
            raise ZeroProbabilityFactor(f"Pr({r}|{s}) = 0 occurs at position {j}")
    if not exact:
        total = 0.0
        for i in range(n):
            total += math.log(float(spec.symbol.prob(bits[i], bits[i - 1])))
            total -= math.log(float(spec.symbol.prob(bits[i], bits[(i + 1) % n])))
        return total
    return LogSum(spec.symbol, tuple(sorted((t, k) for t, k in ledger.items() if k)))


def three_word_counterexample() -> ChannelMatrix:
    """The 3-word channel on {a, b, c} whose weak and strong matchedness differ."""
    h, q, s, t = Fraction(1, 2), Fraction(1, 4), Fraction(1, 6), Fraction(1, 3)
    # rows are received words, columns sent words
    rows = [
        [h, q, q],  # Pr(a|a), Pr(a|b), Pr(a|c)
        [s, h, t],  # Pr(b|a), Pr(b|b), Pr(b|c)
        [t, s, h],  # Pr(c|a), Pr(c|b), Pr(c|c)
    ]
    return ChannelMatrix.from_rows(rows, "received-row", labels=("a", "b", "c"))


# --- JSON -------------------------------------------------------------------

def channel_to_json(ch: ChannelMatrix) -> dict:
    return {
        "labels": ch.space.all_labels(),
        "matrix": [[format_value(v) for v in row] for row in ch.entries],
        "stochastic_axis": ch.stochastic_axis.value,
    }


def product_spec_from_json(obj: Mapping) -> ProductChannelSpec:
    try:
        kind, m = obj["kind"], int(obj["m"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ChannelError(f"bad product spec: {obj!r}") from exc
    symbol = make_channel(kind, obj.get("p"), obj.get("q"))
    return ProductChannelSpec(symbol, m)


def product_spec_to_json(spec: ProductChannelSpec) -> dict:
    return {
        "kind": spec.symbol.kind,
        "p": format_value(spec.symbol.p01),
        "q": format_value(spec.symbol.p10),
        "m": spec.length,
    }


def channel_from_json(obj: Mapping, cap: Optional[int] = None) -> ChannelMatrix:
    """Parse either an explicit matrix document or a product spec document."""
    if not isinstance(obj, Mapping):
        raise ChannelError("channel JSON must be an object")
    if "kind" in obj:
        return expand_product(product_spec_from_json(obj), cap)
    if "matrix" not in obj:
        raise ChannelError("channel JSON needs a 'matrix' or a 'kind' field")
    return ChannelMatrix.from_rows(
        obj["matrix"],
        obj.get("stochastic_axis", "sent-column"),
        labels=obj.get("labels"),
    )


def load_channel(path: Union[str, Path], cap: Optional[int] = None) -> ChannelMatrix:
    with open(path, encoding="utf-8") as fh:
        return channel_from_json(json.load(fh), cap)


def hamming(x: int, y: int) -> int:
    return bin(x ^ y).count("1")


def all_words(length: int) -> Iterable[int]:
    return range(2 ** length)
