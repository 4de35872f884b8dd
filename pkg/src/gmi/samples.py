"""Paired samples: ingestion, Gaussian generation and the split/shuffle step."""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "PairedSampleSet",
    "ShuffleMode",
    "SplitShuffleConfig",
    "GaussianSpec",
    "load_csv",
    "load_points",
    "generate_gaussian",
    "split_sizes",
    "split_indices",
    "split_and_shuffle",
    "rng_stream",
]

# Independent RNG streams derived from one user seed.
STREAM_DATA = 0
STREAM_SPLIT = 1
STREAM_SHUFFLE = 2
STREAM_MC = 3


def rng_stream(seed: int, stream: int, *extra: int) -> np.random.Generator:
    """Generator for ``(seed, stream, *extra)``; distinct tuples never share state."""
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(stream, *extra))
    return np.random.default_rng(ss)


@dataclass(frozen=True)
class PairedSampleSet:
    """``n`` joint realisations ``z_i = (x_i, y_i)`` stored row-wise.

    The first ``dx`` columns hold the x-block and the remaining ``dy``
    columns the y-block.
    """

    points: np.ndarray
    dx: int
    dy: int

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-d array")
        if self.dx < 1 or self.dy < 1:
            raise ValueError(f"dx and dy must be >= 1, got dx={self.dx}, dy={self.dy}")
        if pts.shape[1] != self.dx + self.dy:
            raise ValueError(
                f"expected {self.dx + self.dy} columns (dx + dy), got {pts.shape[1]}"
            )
        if pts.shape[0] < 2:
            raise ValueError(f"need at least 2 samples, got {pts.shape[0]}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("all coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.dx + self.dy

    @property
    def x(self) -> np.ndarray:
        return self.points[:, : self.dx]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, self.dx :]

    def take(self, rows) -> "PairedSampleSet":
        return PairedSampleSet(self.points[np.asarray(rows)], self.dx, self.dy)


class ShuffleMode(str, enum.Enum):
    """How the y-blocks of the held-out half are re-paired with x-blocks."""

    PERMUTATION = "perm"
    INDEPENDENT_DRAW = "indep"


@dataclass(frozen=True)
class SplitShuffleConfig:
    alpha: float
    seed: int = 0
    shuffle_mode: ShuffleMode = ShuffleMode.PERMUTATION

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "shuffle_mode", ShuffleMode(self.shuffle_mode))

    def with_seed(self, seed: int) -> "SplitShuffleConfig":
        return SplitShuffleConfig(self.alpha, seed, self.shuffle_mode)


@dataclass(frozen=True)
class GaussianSpec:
    """Zero-mean Gaussian family used in the experiments.

    ``rho == 0`` gives the standard normal in ``d`` dimensions.  A nonzero
    ``rho`` is only defined for ``d == 2`` (unit variances, correlation
    ``rho``).  The x-block is the first ``dx`` coordinates; by default
    ``dx = d // 2``.
    """

    d: int
    n: int
    rho: float = 0.0
    seed: int = 0
    dx: int | None = None
    cov: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        dx = self.d // 2 if self.dx is None else self.dx
        if not 1 <= dx < self.d:
            raise ValueError(f"dx must lie in [1, d-1], got {dx}")
        object.__setattr__(self, "dx", dx)
        if self.rho != 0.0 and self.d != 2:
            raise ValueError("a nonzero rho is only defined for the 2-d family")
        cov = np.eye(self.d)
        if self.d == 2:
            cov[0, 1] = cov[1, 0] = self.rho
        # Cholesky doubles as the positive-definiteness check.
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            raise ValueError(f"covariance is not positive definite (rho={self.rho})") from None
        object.__setattr__(self, "cov", cov)


def _parse_rows(path: Path):
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            yield lineno, [c.strip() for c in row]


def load_points(path) -> np.ndarray:
    """Read a headerless-or-headed numeric CSV into a float matrix."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    rows = []
    width = None
    for lineno, fields in _parse_rows(path):
        try:
            vals = [float(c) for c in fields]
        except ValueError:
            if not rows and lineno == 1:
                continue  # header line
            bad = next(i for i, c in enumerate(fields) if not _is_float(c))
            raise ValueError(
                f"{path}:{lineno}: column {bad + 1}: cannot parse {fields[bad]!r} as a number"
            ) from None
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise ValueError(f"{path}:{lineno}: expected {width} fields, got {len(vals)}")
        for col, v in enumerate(vals):
            if not math.isfinite(v):
                raise ValueError(f"{path}:{lineno}: column {col + 1}: non-finite value {fields[col]!r}")
        rows.append(vals)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def _is_float(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def load_csv(path, dx: int, dy: int) -> PairedSampleSet:
    """Load a sample file: one row per sample, ``dx`` x-values then ``dy`` y-values."""
    pts = load_points(path)
    if pts.shape[1] != dx + dy:
        raise ValueError(f"{path}: rows have {pts.shape[1]} fields, expected dx + dy = {dx + dy}")
    return PairedSampleSet(pts, dx, dy)


def generate_gaussian(spec: GaussianSpec) -> PairedSampleSet:
    rng = rng_stream(spec.seed, STREAM_DATA)
    if spec.rho == 0.0:
        pts = rng.standard_normal((spec.n, spec.d))
    else:
        chol = np.linalg.cholesky(spec.cov)
        pts = rng.standard_normal((spec.n, spec.d)) @ chol.T
    return PairedSampleSet(pts, spec.dx, spec.d - spec.dx)


def split_sizes(n: int, alpha: float) -> tuple[int, int]:
    """``(n', n'')`` with ``n' = round(alpha * n)``, halves rounded up."""
    n1 = math.floor(alpha * n + 0.5)
    n2 = n - n1
    if n1 < 2 or n2 < 2:
        raise ValueError(
            f"degenerate split: alpha={alpha}, n={n} gives n'={n1}, n''={n2} (both must be >= 2)"
        )
    return n1, n2


def split_indices(n: int, cfg: SplitShuffleConfig) -> tuple[np.ndarray, np.ndarray]:
    """Row indices of the kept half and the half that gets shuffled."""
    n1, _ = split_sizes(n, cfg.alpha)
    perm = rng_stream(cfg.seed, STREAM_SPLIT).permutation(n)
    return perm[:n1], perm[n1:]


def split_and_shuffle(
    data: PairedSampleSet, cfg: SplitShuffleConfig
) -> tuple[PairedSampleSet, PairedSampleSet]:
    """Split the sample and break the x/y pairing in the second part.

    Returns ``(first, shuffled)``.  ``first`` holds ``n'`` untouched rows.
    ``shuffled`` has ``n''`` rows whose y-blocks are re-paired within the
    held-out half, either by one uniform permutation or by drawing the x and
    y indices independently with replacement.
    """
    first_idx, second_idx = split_indices(data.n, cfg)
    second = data.points[second_idx]
    m = second.shape[0]
    rng = rng_stream(cfg.seed, STREAM_SHUFFLE)
    if cfg.shuffle_mode is ShuffleMode.PERMUTATION:
        xi = np.arange(m)
        yi = rng.permutation(m)
    else:
        xi = rng.integers(0, m, size=m)
        yi = rng.integers(0, m, size=m)
    shuffled = np.hstack([second[xi, : data.dx], second[yi, data.dx :]])
    return data.take(first_idx), PairedSampleSet(shuffled, data.dx, data.dy)
