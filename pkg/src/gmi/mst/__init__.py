"""Exact Euclidean minimum spanning trees.

Two interchangeable algorithms are provided:

* ``quadratic`` — dense Prim, O(n^2) time and O(n) memory; best for small n.
* ``dualtree``  — Borůvka rounds where each point's nearest neighbour in a
  different component is found with a kd-tree whose nodes are pruned when
  they hold a single component.  Sub-quadratic in low dimension.

Ties between equal-length edges are broken by ``(min(i, j), max(i, j))`` on
original row indices, which makes the tree unique; both algorithms return
exactly the same edge set.

The kernels come from a compiled extension when it is importable, otherwise
from a pure-Python fallback.  Set ``GMI_PURE_PYTHON=1`` to force the
fallback.  :data:`BACKEND` reports which one is active.
"""
from __future__ import annotations

import importlib
import os
from dataclasses import dataclass

import numpy as np

from . import _fallback
from .kdtree import KdTree

__all__ = [
    "SpanningTree",
    "euclidean_mst",
    "mst_quadratic",
    "mst_dualtree",
    "BACKEND",
    "DEFAULT_CUTOFF",
    "AUTO_MAX_DIM",
    "PYTHON_CUTOFF",
    "KdTree",
]

def _load_core():
    if os.environ.get("GMI_PURE_PYTHON", "") in ("1", "true", "yes"):
        return None
    try:
        return importlib.import_module(".mst._core", "gmi")
    except ImportError:  # extension not built
        return None


_core = _load_core()

BACKEND = "compiled" if _core is not None else "python"

DEFAULT_CUTOFF = 512
# The interpreted tree search is ~100x slower than the vectorized dense
# kernel per operation, so without the extension auto stays dense much longer.
PYTHON_CUTOFF = 50_000
# kd-tree pruning degrades with dimension; above this the dense kernel wins
# at every n we measured (see benchmarks/bench_mst.py).
AUTO_MAX_DIM = 4
LEAF_SIZE = 16


@dataclass(frozen=True)
class SpanningTree:
    """``n - 1`` edges as an ``(n-1, 2)`` int array (``i < j``) plus lengths.

    Edges are sorted by ``(length, i, j)``.
    """

    n: int
    edges: np.ndarray
    weights: np.ndarray

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def __len__(self) -> int:
        return self.edges.shape[0]


def _kernels(use_compiled: bool | None):
    if use_compiled is None:
        use_compiled = _core is not None
    if use_compiled and _core is None:
        raise RuntimeError("compiled MST extension is not available")
    return _core if use_compiled else _fallback


def _validate(points) -> np.ndarray:
    X = np.ascontiguousarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError("points must be a 2-d array")
    if X.shape[0] < 2:
        raise ValueError(f"need at least 2 points for a spanning tree, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("points must be finite")
    return X


def _finish(n, i, j, d2) -> SpanningTree:
    order = np.lexsort((j, i, d2))
    edges = np.column_stack([i[order], j[order]]).astype(np.int64)
    return SpanningTree(n, edges, np.sqrt(d2[order]))


def mst_quadratic(points, *, compiled: bool | None = None) -> SpanningTree:
    X = _validate(points)
    i, j, d2 = _kernels(compiled).prim(X)
    return _finish(X.shape[0], i, j, d2)


def mst_dualtree(points, *, compiled: bool | None = None, leaf_size: int = LEAF_SIZE) -> SpanningTree:
    X = _validate(points)
    t = KdTree(X, leaf_size=leaf_size)
    i, j, d2 = _kernels(compiled).boruvka(
        t.data, t.idx, t.start, t.end, t.left, t.right, t.lo, t.hi
    )
    return _finish(X.shape[0], i, j, d2)


def euclidean_mst(
    points, backend: str = "auto", cutoff: int | None = None, *, compiled: bool | None = None
) -> SpanningTree:
    """Exact Euclidean MST of the rows of ``points``.

    ``backend`` is ``"quadratic"``, ``"dualtree"`` or ``"auto"``.  Auto picks
    the dual-tree kernel when ``n > cutoff`` and the dimension is at most
    :data:`AUTO_MAX_DIM`, and the dense kernel otherwise.  ``cutoff=None``
    means :data:`DEFAULT_CUTOFF` with compiled kernels and
    :data:`PYTHON_CUTOFF` with the fallback.
    """
    if backend == "auto":
        if cutoff is None:
            uses_compiled = _core is not None if compiled is None else compiled
            cutoff = DEFAULT_CUTOFF if uses_compiled else PYTHON_CUTOFF
        shape = np.shape(points)
        dim = shape[1] if len(shape) > 1 else 1
        backend = "dualtree" if shape[0] > cutoff and dim <= AUTO_MAX_DIM else "quadratic"
    if backend == "quadratic":
        return mst_quadratic(points, compiled=compiled)
    if backend == "dualtree":
        return mst_dualtree(points, compiled=compiled)
    raise ValueError(f"unknown MST backend {backend!r}; expected auto, quadratic or dualtree")
