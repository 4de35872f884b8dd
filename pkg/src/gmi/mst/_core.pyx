# cython: language_level=3
"""Compiled MST kernels.

Edge order everywhere is the strict total order on ``(d2, a, b)`` where
``d2`` is the squared distance and ``a < b`` are original row indices.
Under that order the MST is unique, so every kernel returns the same tree.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

ctypedef cnp.int64_t idx_t


cdef inline bint _less(double d1, idx_t a1, idx_t b1,
                       double d2, idx_t a2, idx_t b2) noexcept nogil:
    if d1 != d2:
        return d1 < d2
    if a1 != a2:
        return a1 < a2
    return b1 < b2


cdef inline double _dist2(const double[:, ::1] X, Py_ssize_t u, Py_ssize_t v,
                          Py_ssize_t dim) noexcept nogil:
    cdef double s = 0.0, t
    cdef Py_ssize_t k
    for k in range(dim):
        t = X[u, k] - X[v, k]
        s += t * t
    return s


def prim(const double[:, ::1] X):
    """Dense Prim on the complete Euclidean graph, O(n^2) time, O(n) memory."""
    cdef Py_ssize_t n = X.shape[0], dim = X.shape[1]
    cdef Py_ssize_t it, v, u, nxt
    cdef double d
    cdef idx_t a, b
    out_i = np.empty(n - 1, dtype=np.int64)
    out_j = np.empty(n - 1, dtype=np.int64)
    out_w = np.empty(n - 1, dtype=np.float64)
    cdef idx_t[::1] oi = out_i, oj = out_j
    cdef double[::1] ow = out_w
    key_np = np.full(n, INFINITY)
    ka_np = np.full(n, -1, dtype=np.int64)
    kb_np = np.full(n, -1, dtype=np.int64)
    intree_np = np.zeros(n, dtype=np.uint8)
    cdef double[::1] key = key_np
    cdef idx_t[::1] ka = ka_np, kb = kb_np
    cdef unsigned char[::1] intree = intree_np

    with nogil:
        u = 0
        intree[0] = 1
        for it in range(n - 1):
            nxt = -1
            for v in range(n):
                if intree[v]:
                    continue
                d = _dist2(X, u, v, dim)
                if u < v:
                    a = u
                    b = v
                else:
                    a = v
                    b = u
                if _less(d, a, b, key[v], ka[v], kb[v]):
                    key[v] = d
                    ka[v] = a
                    kb[v] = b
                if nxt < 0 or _less(key[v], ka[v], kb[v], key[nxt], ka[nxt], kb[nxt]):
                    nxt = v
            oi[it] = ka[nxt]
            oj[it] = kb[nxt]
            ow[it] = key[nxt]
            intree[nxt] = 1
            u = nxt
    return out_i, out_j, out_w


cdef idx_t _find(idx_t[::1] parent, idx_t x) noexcept nogil:
    cdef idx_t root = x, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


cdef struct Best:
    double d2
    idx_t a      # original ids, a < b
    idx_t b
    idx_t pa     # tree positions, for the union step
    idx_t pb


cdef void _search(idx_t node, Py_ssize_t q, idx_t c, idx_t oq,
                  const double[:, ::1] data, const idx_t[::1] idx,
                  const idx_t[::1] start, const idx_t[::1] end,
                  const idx_t[::1] left, const idx_t[::1] right,
                  const double[:, ::1] lo, const double[:, ::1] hi,
                  const idx_t[::1] comp, const idx_t[::1] node_comp,
                  Best* best, Py_ssize_t dim) noexcept nogil:
    cdef double md, t, s, ml, mr
    cdef Py_ssize_t k, p
    cdef idx_t op, a, b, first, second

    if node_comp[node] == c:
        return
    md = _box_dist2(node, q, data, lo, hi, dim)
    if md > best.d2:
        return
    if left[node] < 0:
        for p in range(start[node], end[node]):
            if comp[p] == c:
                continue
            s = 0.0
            for k in range(dim):
                t = data[q, k] - data[p, k]
                s += t * t
                if s > best.d2:
                    break
            if s > best.d2:
                continue
            op = idx[p]
            if oq < op:
                a = oq
                b = op
            else:
                a = op
                b = oq
            if _less(s, a, b, best.d2, best.a, best.b):
                best.d2 = s
                best.a = a
                best.b = b
                best.pa = q
                best.pb = p
        return
    ml = _box_dist2(left[node], q, data, lo, hi, dim)
    mr = _box_dist2(right[node], q, data, lo, hi, dim)
    if ml <= mr:
        first = left[node]
        second = right[node]
    else:
        first = right[node]
        second = left[node]
    _search(first, q, c, oq, data, idx, start, end, left, right, lo, hi,
            comp, node_comp, best, dim)
    _search(second, q, c, oq, data, idx, start, end, left, right, lo, hi,
            comp, node_comp, best, dim)


cdef inline double _box_dist2(idx_t node, Py_ssize_t q, const double[:, ::1] data,
                              const double[:, ::1] lo, const double[:, ::1] hi,
                              Py_ssize_t dim) noexcept nogil:
    cdef double s = 0.0, t, x
    cdef Py_ssize_t k
    for k in range(dim):
        x = data[q, k]
        if x < lo[node, k]:
            t = lo[node, k] - x
            s += t * t
        elif x > hi[node, k]:
            t = x - hi[node, k]
            s += t * t
    return s


def boruvka(const double[:, ::1] data, const idx_t[::1] idx,
            const idx_t[::1] start, const idx_t[::1] end,
            const idx_t[::1] left, const idx_t[::1] right,
            const double[:, ::1] lo, const double[:, ::1] hi):
    """Borůvka rounds with kd-tree nearest-foreign-neighbour search.

    ``data`` is in tree order; returned edges use original ids from ``idx``.
    """
    cdef Py_ssize_t n = data.shape[0], dim = data.shape[1]
    cdef Py_ssize_t n_nodes = start.shape[0]
    cdef Py_ssize_t q, p, e_count = 0, node
    cdef idx_t c, cl, cr, ra, rb
    cdef Best cand
    out_i = np.empty(n - 1, dtype=np.int64)
    out_j = np.empty(n - 1, dtype=np.int64)
    out_w = np.empty(n - 1, dtype=np.float64)
    cdef idx_t[::1] oi = out_i, oj = out_j
    cdef double[::1] ow = out_w

    parent_np = np.arange(n, dtype=np.int64)
    comp_np = np.empty(n, dtype=np.int64)
    node_comp_np = np.empty(n_nodes, dtype=np.int64)
    best_d_np = np.empty(n, dtype=np.float64)
    best_a_np = np.empty(n, dtype=np.int64)
    best_b_np = np.empty(n, dtype=np.int64)
    best_pa_np = np.empty(n, dtype=np.int64)
    best_pb_np = np.empty(n, dtype=np.int64)
    cdef idx_t[::1] parent = parent_np, comp = comp_np, node_comp = node_comp_np
    cdef double[::1] best_d = best_d_np
    cdef idx_t[::1] best_a = best_a_np, best_b = best_b_np
    cdef idx_t[::1] best_pa = best_pa_np, best_pb = best_pb_np

    with nogil:
        while e_count < n - 1:
            for q in range(n):
                comp[q] = _find(parent, q)
                best_d[q] = INFINITY
                best_a[q] = -1
                best_b[q] = -1
            # children have larger ids than parents
            for node in range(n_nodes - 1, -1, -1):
                if left[node] < 0:
                    c = comp[start[node]]
                    for p in range(start[node] + 1, end[node]):
                        if comp[p] != c:
                            c = -1
                            break
                    node_comp[node] = c
                else:
                    cl = node_comp[left[node]]
                    cr = node_comp[right[node]]
                    node_comp[node] = cl if cl == cr else -1
            for q in range(n):
                c = comp[q]
                cand.d2 = best_d[c]
                cand.a = best_a[c]
                cand.b = best_b[c]
                cand.pa = best_pa[c]
                cand.pb = best_pb[c]
                _search(0, q, c, idx[q], data, idx, start, end, left, right,
                        lo, hi, comp, node_comp, &cand, dim)
                best_d[c] = cand.d2
                best_a[c] = cand.a
                best_b[c] = cand.b
                best_pa[c] = cand.pa
                best_pb[c] = cand.pb
            for q in range(n):
                if comp[q] != q or best_a[q] < 0:
                    continue
                ra = _find(parent, best_pa[q])
                rb = _find(parent, best_pb[q])
                if ra == rb:
                    continue
                parent[ra] = rb
                oi[e_count] = best_a[q]
                oj[e_count] = best_b[q]
                ow[e_count] = best_d[q]
                e_count += 1
    return out_i, out_j, out_w
