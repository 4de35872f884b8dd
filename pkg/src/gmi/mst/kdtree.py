"""Flat-array kd-tree shared by the compiled and pure-Python MST kernels."""
from __future__ import annotations

import numpy as np

__all__ = ["KdTree"]


class KdTree:
    """Balanced kd-tree over an ``(n, D)`` point matrix.

    Nodes are stored in flat arrays in preorder, so a child always has a
    larger id than its parent.  ``idx`` maps tree positions to original row
    indices and ``data`` holds the points in tree order.  Each node covers
    the contiguous position range ``[start, end)`` and carries a tight
    bounding box ``lo``/``hi``.  Splits are at the median of the widest
    box dimension.
    """

    def __init__(self, points, leaf_size: int = 16):
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("points must be a non-empty 2-d array")
        if leaf_size < 1:
            raise ValueError("leaf_size must be >= 1")
        n, dim = pts.shape
        self.n = n
        self.dim = dim
        self.leaf_size = leaf_size

        idx = np.arange(n, dtype=np.int64)
        start, end, left, right, lo, hi = [], [], [], [], [], []

        # (node id is assigned on pop; parent patches its child slot)
        stack = [(0, n, -1, 0)]
        while stack:
            s, e, parent, side = stack.pop()
            node = len(start)
            if parent >= 0:
                (left if side == 0 else right)[parent] = node
            block = pts[idx[s:e]]
            blo = block.min(axis=0)
            bhi = block.max(axis=0)
            start.append(s)
            end.append(e)
            left.append(-1)
            right.append(-1)
            lo.append(blo)
            hi.append(bhi)
            if e - s <= leaf_size:
                continue
            axis = int(np.argmax(bhi - blo))
            if bhi[axis] == blo[axis]:
                continue  # all points coincide; keep as an oversized leaf
            mid = (e - s) // 2
            order = np.argpartition(block[:, axis], mid)
            idx[s:e] = idx[s:e][order]
            # push right first so the left child gets the next id
            stack.append((s + mid, e, node, 1))
            stack.append((s, s + mid, node, 0))

        self.idx = idx
        self.data = np.ascontiguousarray(pts[idx])
        self.start = np.asarray(start, dtype=np.int64)
        self.end = np.asarray(end, dtype=np.int64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.lo = np.ascontiguousarray(lo, dtype=np.float64).reshape(-1, dim)
        self.hi = np.ascontiguousarray(hi, dtype=np.float64).reshape(-1, dim)

    @property
    def n_nodes(self) -> int:
        return len(self.start)

    def min_dist2(self, node: int, q: np.ndarray) -> float:
        gap = np.maximum(np.maximum(self.lo[node] - q, q - self.hi[node]), 0.0)
        return float(gap @ gap)

    def query(self, q) -> tuple[int, float]:
        """Exact nearest neighbour of ``q``: ``(row index, distance)``.

        Ties go to the smaller original row index.
        """
        q = np.asarray(q, dtype=np.float64)
        best = (np.inf, -1)
        stack = [0]
        while stack:
            node = stack.pop()
            if self.min_dist2(node, q) > best[0]:
                continue
            if self.left[node] < 0:
                s, e = self.start[node], self.end[node]
                diff = self.data[s:e] - q
                d2 = np.einsum("ij,ij->i", diff, diff)
                for k in np.flatnonzero(d2 <= best[0]):
                    cand = (float(d2[k]), int(self.idx[s + k]))
                    if cand < best:
                        best = cand
                continue
            a, b = self.left[node], self.right[node]
            if self.min_dist2(a, q) > self.min_dist2(b, q):
                a, b = b, a
            stack.append(b)
            stack.append(a)
        return best[1], float(np.sqrt(best[0]))
