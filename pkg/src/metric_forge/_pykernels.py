"""Pure-Python kernels. Same signatures and outputs as the compiled ``_ckernels``.

All inputs are int64 numpy arrays of per-row ranks (-1 = outside the domain)
or distance matrices; outputs are int64 numpy arrays.
"""
import heapq

import numpy as np


def pair_index(lo, hi, n):
    if lo > hi:
        lo, hi = hi, lo
    return lo * (2 * n - lo - 1) // 2 + (hi - lo - 1)


def _as_array(rows, width):
    if not rows:
        return np.empty((0, width), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


def build_edges(ranks):
    """Edges ``{x,y} -> {x,z}`` for every pivot x with rank(x,y) > rank(x,z) >= 0."""
    r = ranks.tolist()
    n = len(r)
    edges = []
    for x in range(n):
        row = r[x]
        cols = [y for y in range(n) if row[y] >= 0]
        for y in cols:
            a = pair_index(x, y, n)
            ry = row[y]
            for z in cols:
                if ry > row[z]:
                    edges.append((a, pair_index(x, z, n)))
    edges.sort()
    return _as_array(edges, 2)


def lex_toposort(n_nodes, indptr, indices):
    """Kahn's algorithm always emitting the smallest available node.

    Returns fewer than ``n_nodes`` entries when the graph has a cycle.
    """
    ptr = indptr.tolist()
    nbr = indices.tolist()
    indeg = [0] * n_nodes
    for v in nbr:
        indeg[v] += 1
    heap = [v for v in range(n_nodes) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for k in range(ptr[u], ptr[u + 1]):
            v = nbr[k]
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    return np.array(order, dtype=np.int64)


def compat_violations(rank_f, rank_d):
    """Triples (x, y, z) where f orders y strictly above z but d(x,y) < d(x,z) fails."""
    f = rank_f.tolist()
    d = rank_d.tolist()
    n = len(f)
    out = []
    for x in range(n):
        fr, dr = f[x], d[x]
        for y in range(n):
            fy = fr[y]
            if fy < 0:
                continue
            for z in range(n):
                fz = fr[z]
                if 0 <= fz < fy and not dr[y] < dr[z]:
                    out.append((x, y, z))
    return _as_array(out, 3)


def triangle_violations(dist, tol=0.0, limit=-1):
    """Triples with dist[x,z] > dist[x,y] + dist[y,z] + tol (int64 or float64 input)."""
    d = dist.tolist()
    n = len(d)
    out = []
    for x in range(n):
        dx = d[x]
        for y in range(n):
            dxy = dx[y]
            dy = d[y]
            for z in range(n):
                if dx[z] > dxy + dy[z] + tol:
                    out.append((x, y, z))
                    if len(out) == limit:
                        return _as_array(out, 3)
    return _as_array(out, 3)


def premise_search(ranks, max_len):
    """Shortest sequence x_0..x_{n-1} (2 <= n <= max_len) breaking the cyclic premise.

    Requires rank(x_0,x_{n-1}) > rank(x_0,x_1), rank(x_i,x_{i-1}) > rank(x_i,x_{i+1})
    for 0 < i < n-1, and rank(x_{n-1},x_{n-2}) > rank(x_{n-1},x_0). Empty if none.
    """
    r = ranks.tolist()
    n = len(r)
    seq = []

    def extend(length):
        k = len(seq) - 1
        if k == length - 1:
            x0, xl, xp = seq[0], seq[-1], seq[-2]
            return (
                r[x0][xl] > r[x0][seq[1]] >= 0
                and r[xl][xp] > r[xl][x0] >= 0
            )
        xk, prev = seq[k], seq[k - 1]
        bound = r[xk][prev]
        row = r[xk]
        for nxt in range(n):
            if 0 <= row[nxt] < bound:
                seq.append(nxt)
                if extend(length):
                    return True
                seq.pop()
        return False

    for length in range(2, max_len + 1):
        for x0 in range(n):
            for x1 in range(n):
                if r[x0][x1] < 0:
                    continue
                seq[:] = [x0, x1]
                if extend(length):
                    return np.array(seq, dtype=np.int64)
    return np.empty(0, dtype=np.int64)
