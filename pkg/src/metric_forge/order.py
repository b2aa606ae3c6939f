"""Preference digraph on unordered pairs, cycle witnesses and linear extensions.

Nodes are the 2-subsets ``{lo, hi}`` of the space, indexed lexicographically by
``(lo, hi)``. An edge ``a -> b`` means ``a = {x, y}``, ``b = {x, z}`` and
``f(x, y) > f(x, z)``: the pair ``a`` must end up strictly closer than ``b``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Mapping, Optional, Sequence

import numpy as np

from . import kernels
from .channel import PartialScore, Space
from .compare import ComparisonPolicy, rank_matrix
from .errors import CycleExists, OracleScaleExceeded

BRUTEFORCE_MAX_SPACE = 6
BRUTEFORCE_MAX_LEN = 8


@dataclass(frozen=True, order=True)
class UnorderedPair:
    lo: int
    hi: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"UnorderedPair needs lo < hi, got ({self.lo}, {self.hi})")

    @classmethod
    def of(cls, x: int, y: int) -> "UnorderedPair":
        return cls(min(x, y), max(x, y))

    def __contains__(self, x) -> bool:
        return x == self.lo or x == self.hi

    def other(self, x: int) -> int:
        if x == self.lo:
            return self.hi
        if x == self.hi:
            return self.lo
        raise ValueError(f"{x} not in {self}")

    def shared(self, b: "UnorderedPair") -> Optional[int]:
        common = {self.lo, self.hi} & {b.lo, b.hi}
        return common.pop() if len(common) == 1 else None

    def index(self, n: int) -> int:
        return kernels.pair_index(self.lo, self.hi, n)

    def labels(self, space: Space) -> list:
        return [space.label(self.lo), space.label(self.hi)]


def all_pairs(n: int) -> list:
    return [UnorderedPair(lo, hi) for lo, hi in combinations(range(n), 2)]


@dataclass(frozen=True)
class TieGroup:
    """Pairs ``{x, y}`` sharing the pivot ``x`` whose scores ``f(x, y)`` are equal."""

    pivot: int
    pairs: tuple


@dataclass(frozen=True)
class PairPreferenceGraph:
    space: Space
    edges: np.ndarray
    tie_groups: tuple
    ranks: np.ndarray

    def __post_init__(self):
        for arr in (self.edges, self.ranks):
            arr.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return comb(self.space.size, 2)

    @property
    def nodes(self) -> list:
        return all_pairs(self.space.size)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def strict_edges(self) -> set:
        nodes = self.nodes
        return {(nodes[a], nodes[b]) for a, b in self.edges.tolist()}

    def has_edge(self, a: UnorderedPair, b: UnorderedPair) -> bool:
        n = self.space.size
        row = np.array([a.index(n), b.index(n)])
        return bool(len(self.edges)) and bool((self.edges == row).all(axis=1).any())

    def csr(self):
        """Adjacency in CSR form; neighbour lists are ascending since edges are sorted."""
        indptr = np.zeros(self.n_nodes + 1, dtype=np.int64)
        if len(self.edges):
            np.add.at(indptr, self.edges[:, 0] + 1, 1)
        return np.cumsum(indptr), np.ascontiguousarray(self.edges[:, 1], dtype=np.int64)


def build_graph(f: PartialScore, cmp: Optional[ComparisonPolicy] = None) -> PairPreferenceGraph:
    cmp = cmp or ComparisonPolicy.default_for(f.is_exact)
    ranks = rank_matrix(f.dense(), cmp)
    edges = kernels.build_edges(ranks)
    ties = []
    for x, row in enumerate(ranks.tolist()):
        by_rank = {}
        for y, r in enumerate(row):
            if r >= 0:
                by_rank.setdefault(r, []).append(y)
        for r in sorted(by_rank):
            if len(by_rank[r]) > 1:
                ties.append(TieGroup(x, tuple(UnorderedPair.of(x, y) for y in by_rank[r])))
    return PairPreferenceGraph(f.space, edges, tuple(ties), ranks)


@dataclass(frozen=True)
class CycleWitness:
    """A closed chain of strict preferences ``z_0 -> z_1 -> ... -> z_0``.

    ``element_sequence[i]`` is the element shared by ``z_i`` and ``z_{i+1}``,
    so ``z_i = {x_{i-1}, x_i}`` and each edge reads
    ``f(x_i, x_{i-1}) > f(x_i, x_{i+1})``. The last of these contradicts the
    conclusion that an acyclic preference would force.
    """

    space: Space
    pair_cycle: tuple
    element_sequence: tuple
    violated_inequalities: tuple

    @classmethod
    def from_elements(cls, space: Space, elements: Sequence[int]) -> "CycleWitness":
        xs = tuple(int(x) for x in elements)
        L = len(xs)
        if L < 3:
            raise ValueError("a witness needs at least 3 elements")
        pairs = tuple(UnorderedPair.of(xs[i - 1], xs[i]) for i in range(L))
        lab = space.label
        ineq = tuple(
            f"f({lab(xs[i])},{lab(xs[i - 1])}) > f({lab(xs[i])},{lab(xs[(i + 1) % L])})"
            for i in range(L)
        )
        return cls(space, pairs, xs, ineq)

    @classmethod
    def from_pair_cycle(cls, space: Space, cycle: Sequence[UnorderedPair]) -> "CycleWitness":
        L = len(cycle)
        xs = []
        for i in range(L):
            x = cycle[i].shared(cycle[(i + 1) % L])
            if x is None:
                raise ValueError(f"{cycle[i]} and {cycle[(i + 1) % L]} do not share one element")
            xs.append(x)
        w = cls.from_elements(space, xs)
        if w.pair_cycle != tuple(cycle):
            raise ValueError("pair cycle has repeated pivots; not a premise witness")
        return w

    def holds_for(self, f: PartialScore, cmp: Optional[ComparisonPolicy] = None) -> bool:
        """True when every inequality of the witness holds strictly for ``f``."""
        cmp = cmp or ComparisonPolicy.default_for(f.is_exact)
        ranks = rank_matrix(f.dense(), cmp)
        xs, L = self.element_sequence, len(self.element_sequence)
        for i in range(L):
            a, b = ranks[xs[i], xs[i - 1]], ranks[xs[i], xs[(i + 1) % L]]
            if b < 0 or not a > b:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "pairs": [p.labels(self.space) for p in self.pair_cycle],
            "elements": [self.space.label(x) for x in self.element_sequence],
            "inequalities": list(self.violated_inequalities),
        }


def _shortest_cycle(n_nodes: int, indptr, indices, candidates: Sequence[int]) -> list:
    allowed = np.zeros(n_nodes, dtype=bool)
    allowed[list(candidates)] = True
    ptr, nbr = indptr.tolist(), indices.tolist()
    best = None
    for s in candidates:
        parent = {s: None}
        queue = deque([s])
        found = None
        while queue and found is None:
            u = queue.popleft()
            for k in range(ptr[u], ptr[u + 1]):
                v = nbr[k]
                if v == s:
                    found = u
                    break
                if allowed[v] and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if found is None:
            continue
        path = []
        u = found
        while u is not None:
            path.append(u)
            u = parent[u]
        path.reverse()
        if best is None or len(path) < len(best):
            best = path
            if len(best) == 3:  # no 2-cycles exist, 3 is minimal
                break
    return best


def find_violation_cycle(gr: PairPreferenceGraph) -> Optional[CycleWitness]:
    """``None`` iff the strict preference digraph is acyclic; otherwise a shortest cycle."""
    indptr, indices = gr.csr()
    order = kernels.lex_toposort(gr.n_nodes, indptr, indices)
    if len(order) == gr.n_nodes:
        return None
    emitted = np.zeros(gr.n_nodes, dtype=bool)
    emitted[order] = True
    stuck = np.flatnonzero(~emitted).tolist()
    cycle = _shortest_cycle(gr.n_nodes, indptr, indices, stuck)
    k = cycle.index(min(cycle))
    cycle = cycle[k:] + cycle[:k]
    nodes = gr.nodes
    return CycleWitness.from_pair_cycle(gr.space, [nodes[i] for i in cycle])


@dataclass(frozen=True)
class LinearExtension:
    """Total order on all pairs; ``g`` is a positive value strictly increasing along it."""

    space: Space
    order: tuple
    g: Mapping

    def __post_init__(self):
        expected = all_pairs(self.space.size)
        if sorted(self.order) != expected:
            raise ValueError("order must be a permutation of all unordered pairs")
        values = [self.g[p] for p in self.order]
        if values[0] <= 0 or any(a >= b for a, b in zip(values, values[1:])):
            raise ValueError("g must be positive and strictly increasing along the order")

    @classmethod
    def from_order(cls, space: Space, order: Sequence[UnorderedPair]) -> "LinearExtension":
        return cls(space, tuple(order), {p: i + 1 for i, p in enumerate(order)})

    def position(self, pair: UnorderedPair) -> int:
        return self.order.index(pair)

    def rank_array(self) -> np.ndarray:
        """``g`` by lexicographic node index."""
        n = self.space.size
        out = np.zeros(len(self.order), dtype=object)
        for p in self.order:
            out[p.index(n)] = self.g[p]
        return out


def linear_extension(gr: PairPreferenceGraph) -> LinearExtension:
    """Topological sort emitting the lexicographically smallest available pair first."""
    indptr, indices = gr.csr()
    order = kernels.lex_toposort(gr.n_nodes, indptr, indices)
    if len(order) != gr.n_nodes:
        raise CycleExists(find_violation_cycle(gr))
    position = np.empty(gr.n_nodes, dtype=np.int64)
    position[order] = np.arange(gr.n_nodes)
    if len(gr.edges) and not (position[gr.edges[:, 0]] < position[gr.edges[:, 1]]).all():
        raise RuntimeError("linear extension does not respect a strict edge")
    nodes = gr.nodes
    return LinearExtension.from_order(gr.space, [nodes[i] for i in order.tolist()])


def premise_bruteforce(
    f: PartialScore,
    max_len: int,
    cmp: Optional[ComparisonPolicy] = None,
    allow_large: bool = False,
) -> Optional[CycleWitness]:
    """Search all sequences of length 2..max_len for one that breaks the cyclic premise.

    Independent of the graph path: works directly on the score. Returns the
    first (hence shortest) violating sequence as a witness, or ``None``.
    """
    n = f.space.size
    if not allow_large and (n > BRUTEFORCE_MAX_SPACE or max_len > BRUTEFORCE_MAX_LEN):
        raise OracleScaleExceeded(
            f"brute force limited to |X| <= {BRUTEFORCE_MAX_SPACE}, max_len <= {BRUTEFORCE_MAX_LEN}"
        )
    cmp = cmp or ComparisonPolicy.default_for(f.is_exact)
    seq = kernels.premise_search(rank_matrix(f.dense(), cmp), max_len)
    if len(seq) == 0:
        return None
    return CycleWitness.from_elements(f.space, seq.tolist())
