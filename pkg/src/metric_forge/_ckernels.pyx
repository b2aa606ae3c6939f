# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; mirror of ``_pykernels`` with identical outputs."""
import numpy as np

ctypedef long long i64


cdef inline i64 _pair(i64 lo, i64 hi, i64 n) nogil:
    cdef i64 t
    if lo > hi:
        t = lo
        lo = hi
        hi = t
    return lo * (2 * n - lo - 1) // 2 + (hi - lo - 1)


def pair_index(lo, hi, n):
    return _pair(lo, hi, n)


def build_edges(ranks):
    cdef const i64[:, ::1] r = np.ascontiguousarray(ranks, dtype=np.int64)
    cdef i64 n = r.shape[0]
    cdef i64 x, y, z, a, count = 0, k = 0
    with nogil:
        for x in range(n):
            for y in range(n):
                if r[x, y] < 0:
                    continue
                for z in range(n):
                    if 0 <= r[x, z] < r[x, y]:
                        count += 1
    out = np.empty((count, 2), dtype=np.int64)
    cdef i64[:, ::1] o = out
    with nogil:
        for x in range(n):
            for y in range(n):
                if r[x, y] < 0:
                    continue
                a = _pair(x, y, n)
                for z in range(n):
                    if 0 <= r[x, z] < r[x, y]:
                        o[k, 0] = a
                        o[k, 1] = _pair(x, z, n)
                        k += 1
    if count:
        out = out[np.lexsort((out[:, 1], out[:, 0]))]
    return out


cdef inline void _sift_down(i64[::1] heap, i64 size, i64 pos) nogil:
    cdef i64 item = heap[pos], child
    while True:
        child = 2 * pos + 1
        if child >= size:
            break
        if child + 1 < size and heap[child + 1] < heap[child]:
            child += 1
        if heap[child] >= item:
            break
        heap[pos] = heap[child]
        pos = child
    heap[pos] = item


cdef inline void _sift_up(i64[::1] heap, i64 pos) nogil:
    cdef i64 item = heap[pos], parent
    while pos > 0:
        parent = (pos - 1) // 2
        if heap[parent] <= item:
            break
        heap[pos] = heap[parent]
        pos = parent
    heap[pos] = item


def lex_toposort(i64 n_nodes, indptr, indices):
    cdef const i64[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const i64[::1] nbr = np.ascontiguousarray(indices, dtype=np.int64)
    indeg_arr = np.zeros(n_nodes, dtype=np.int64)
    heap_arr = np.empty(max(n_nodes, 1), dtype=np.int64)
    order_arr = np.empty(n_nodes, dtype=np.int64)
    cdef i64[::1] indeg = indeg_arr
    cdef i64[::1] heap = heap_arr
    cdef i64[::1] order = order_arr
    cdef i64 i, u, v, k, size = 0, emitted = 0
    with nogil:
        for i in range(nbr.shape[0]):
            indeg[nbr[i]] += 1
        for v in range(n_nodes):
            if indeg[v] == 0:
                heap[size] = v
                size += 1
        # ascending fill is already a valid min-heap
        while size > 0:
            u = heap[0]
            size -= 1
            if size > 0:
                heap[0] = heap[size]
                _sift_down(heap, size, 0)
            order[emitted] = u
            emitted += 1
            for k in range(ptr[u], ptr[u + 1]):
                v = nbr[k]
                indeg[v] -= 1
                if indeg[v] == 0:
                    heap[size] = v
                    _sift_up(heap, size)
                    size += 1
    return order_arr[:emitted].copy()


def compat_violations(rank_f, rank_d):
    cdef const i64[:, ::1] f = np.ascontiguousarray(rank_f, dtype=np.int64)
    cdef const i64[:, ::1] d = np.ascontiguousarray(rank_d, dtype=np.int64)
    cdef i64 n = f.shape[0]
    cdef i64 x, y, z, count = 0, k = 0
    with nogil:
        for x in range(n):
            for y in range(n):
                if f[x, y] < 0:
                    continue
                for z in range(n):
                    if 0 <= f[x, z] < f[x, y] and not d[x, y] < d[x, z]:
                        count += 1
    out = np.empty((count, 3), dtype=np.int64)
    cdef i64[:, ::1] o = out
    if count:
        with nogil:
            for x in range(n):
                for y in range(n):
                    if f[x, y] < 0:
                        continue
                    for z in range(n):
                        if 0 <= f[x, z] < f[x, y] and not d[x, y] < d[x, z]:
                            o[k, 0] = x
                            o[k, 1] = y
                            o[k, 2] = z
                            k += 1
    return out


cdef i64 _tri_int(const i64[:, ::1] d, i64[:, ::1] o, i64 limit) nogil:
    cdef i64 n = d.shape[0], x, y, z, k = 0
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if d[x, z] > d[x, y] + d[y, z]:
                    if k < o.shape[0]:
                        o[k, 0] = x
                        o[k, 1] = y
                        o[k, 2] = z
                    k += 1
                    if k == limit:
                        return k
    return k


cdef i64 _tri_float(const double[:, ::1] d, double tol, i64[:, ::1] o, i64 limit) nogil:
    cdef i64 n = d.shape[0], x, y, z, k = 0
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if d[x, z] > d[x, y] + d[y, z] + tol:
                    if k < o.shape[0]:
                        o[k, 0] = x
                        o[k, 1] = y
                        o[k, 2] = z
                    k += 1
                    if k == limit:
                        return k
    return k


def triangle_violations(dist, tol=0.0, limit=-1):
    scratch = np.empty((0, 3), dtype=np.int64)
    if np.issubdtype(np.asarray(dist).dtype, np.integer):
        di = np.ascontiguousarray(dist, dtype=np.int64)
        count = _tri_int(di, scratch, limit)
        if count == 0:
            return scratch
        out = np.empty((count, 3), dtype=np.int64)
        _tri_int(di, out, limit)
        return out
    df = np.ascontiguousarray(dist, dtype=np.float64)
    count = _tri_float(df, tol, scratch, limit)
    if count == 0:
        return scratch
    out = np.empty((count, 3), dtype=np.int64)
    _tri_float(df, tol, out, limit)
    return out


cdef bint _extend(const i64[:, ::1] r, i64[::1] seq, i64 k, i64 length) nogil:
    cdef i64 n = r.shape[0], x0, xl, xp, xk, bound, nxt
    if k == length - 1:
        x0 = seq[0]
        xl = seq[k]
        xp = seq[k - 1]
        return (r[x0, seq[1]] >= 0 and r[x0, xl] > r[x0, seq[1]]
                and r[xl, x0] >= 0 and r[xl, xp] > r[xl, x0])
    xk = seq[k]
    bound = r[xk, seq[k - 1]]
    for nxt in range(n):
        if 0 <= r[xk, nxt] < bound:
            seq[k + 1] = nxt
            if _extend(r, seq, k + 1, length):
                return True
    return False


def premise_search(ranks, i64 max_len):
    cdef const i64[:, ::1] r = np.ascontiguousarray(ranks, dtype=np.int64)
    cdef i64 n = r.shape[0], length, x0, x1
    seq_arr = np.zeros(max(max_len, 2), dtype=np.int64)
    cdef i64[::1] seq = seq_arr
    with nogil:
        for length in range(2, max_len + 1):
            for x0 in range(n):
                for x1 in range(n):
                    if r[x0, x1] < 0:
                        continue
                    seq[0] = x0
                    seq[1] = x1
                    if _extend(r, seq, 1, length):
                        with gil:
                            return seq_arr[:length].copy()
    return np.empty(0, dtype=np.int64)
