"""Pure-Python/numpy MST kernels with the same contract as the compiled core.

Both return ``(i, j, d2)`` arrays of length ``n - 1`` with ``i < j`` original
row indices and squared edge lengths, in the order edges were added.
"""
from __future__ import annotations

import numpy as np

__all__ = ["prim", "boruvka"]


def prim(X: np.ndarray):
    """Dense Prim, vectorised over the candidate set; O(n^2) time."""
    n = X.shape[0]
    key = np.full(n, np.inf)
    ka = np.full(n, -1, dtype=np.int64)  # smaller endpoint of the best edge
    kb = np.full(n, -1, dtype=np.int64)
    intree = np.zeros(n, dtype=bool)
    out_i = np.empty(n - 1, dtype=np.int64)
    out_j = np.empty(n - 1, dtype=np.int64)
    out_w = np.empty(n - 1, dtype=np.float64)
    ar = np.arange(n, dtype=np.int64)
    u = 0
    intree[0] = True
    for it in range(n - 1):
        cand = ~intree
        diff = X - X[u]
        d = np.einsum("ij,ij->i", diff, diff)
        a = np.minimum(ar, u)
        b = np.maximum(ar, u)
        better = cand & (
            (d < key) | ((d == key) & ((a < ka) | ((a == ka) & (b < kb))))
        )
        key[better] = d[better]
        ka[better] = a[better]
        kb[better] = b[better]
        # lexicographic argmin of (key, ka, kb) over the candidates
        vs = np.flatnonzero(cand)
        kv = key[vs]
        vs = vs[kv == kv.min()]
        if vs.size > 1:
            vs = vs[np.lexsort((kb[vs], ka[vs]))]
        nxt = int(vs[0])
        out_i[it], out_j[it], out_w[it] = ka[nxt], kb[nxt], key[nxt]
        intree[nxt] = True
        u = nxt
    return out_i, out_j, out_w


def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


def boruvka(data, idx, start, end, left, right, lo, hi):
    """Borůvka rounds with kd-tree nearest-foreign-neighbour search.

    Mirrors the compiled kernel, including the component-pruning rule: a
    subtree whose points all share the query's component is skipped.
    """
    n = data.shape[0]
    n_nodes = start.shape[0]
    parent = list(range(n))
    out = []
    idx_l = idx.tolist()
    left_l = left.tolist()
    right_l = right.tolist()
    start_l = start.tolist()
    end_l = end.tolist()

    while len(out) < n - 1:
        comp = np.array([_find(parent, q) for q in range(n)], dtype=np.int64)
        node_comp = np.empty(n_nodes, dtype=np.int64)
        for node in range(n_nodes - 1, -1, -1):
            if left_l[node] < 0:
                c = comp[start_l[node] : end_l[node]]
                node_comp[node] = c[0] if np.all(c == c[0]) else -1
            else:
                cl, cr = node_comp[left_l[node]], node_comp[right_l[node]]
                node_comp[node] = cl if cl == cr else -1
        best = {}  # component -> (d2, a, b, pos_a, pos_b)
        for q in range(n):
            c = int(comp[q])
            cur = best.get(c, (np.inf, -1, -1, -1, -1))
            xq = data[q]
            oq = idx_l[q]
            stack = [0]
            while stack:
                node = stack.pop()
                if node_comp[node] == c:
                    continue
                gap = np.maximum(np.maximum(lo[node] - xq, xq - hi[node]), 0.0)
                if gap @ gap > cur[0]:
                    continue
                if left_l[node] < 0:
                    s, e = start_l[node], end_l[node]
                    diff = data[s:e] - xq
                    d2 = np.einsum("ij,ij->i", diff, diff)
                    ok = (comp[s:e] != c) & (d2 <= cur[0])
                    for k in np.flatnonzero(ok):
                        op = idx_l[s + k]
                        a, b = (oq, op) if oq < op else (op, oq)
                        cand = (float(d2[k]), a, b, q, s + int(k))
                        if cand[:3] < cur[:3]:
                            cur = cand
                    continue
                l, r = left_l[node], right_l[node]
                gl = np.maximum(np.maximum(lo[l] - xq, xq - hi[l]), 0.0)
                gr = np.maximum(np.maximum(lo[r] - xq, xq - hi[r]), 0.0)
                if gl @ gl <= gr @ gr:
                    stack.extend((r, l))
                else:
                    stack.extend((l, r))
            best[c] = cur
        for c in sorted(best):
            d2, a, b, pa, pb = best[c]
            if a < 0:
                continue
            ra, rb = _find(parent, pa), _find(parent, pb)
            if ra == rb:
                continue
            parent[ra] = rb
            out.append((a, b, d2))
    arr = np.array(out, dtype=object)
    return (
        arr[:, 0].astype(np.int64),
        arr[:, 1].astype(np.int64),
        arr[:, 2].astype(np.float64),
    )
