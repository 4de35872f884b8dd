"""Reference estimators: KDE plug-in GMI and Monte-Carlo truth for Gaussians."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .samples import STREAM_MC, PairedSampleSet, rng_stream

__all__ = ["KdeConfig", "kde_gmi", "TruthOracle", "mc_true_gmi", "gaussian_density_ratio"]


@dataclass(frozen=True)
class KdeConfig:
    """Gaussian product-kernel KDE settings.

    ``bandwidth=None`` means ``n ** (-1 / (d + 1))`` with ``d = dx + dy``;
    the same bandwidth is used for the joint and both marginals.
    """

    bandwidth: float | None = None
    chunk: int = 1024

    def __post_init__(self):
        if self.bandwidth is not None and not (math.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")
        if self.chunk < 1:
            raise ValueError("chunk must be >= 1")

    def h(self, n: int, d: int) -> float:
        return self.bandwidth if self.bandwidth is not None else n ** (-1.0 / (d + 1))


def _sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d2 = (a * a).sum(1)[:, None] + (b * b).sum(1)[None, :] - 2.0 * a @ b.T
    return np.maximum(d2, 0.0)


def kde_gmi(data: PairedSampleSet, p: float, cfg: KdeConfig = KdeConfig()) -> float:
    """Plug-in estimate ``1 - mean_i 1 / (p r_i + q)``.

    ``r_i = f_XY(z_i) / (f_X(x_i) f_Y(y_i))`` uses leave-in Gaussian KDEs.
    The kernel normalizing constants cancel in ``r`` except for
    ``(2 pi h^2)^{-(dx+dy)/2}`` against ``(2 pi h^2)^{-dx/2} (2 pi h^2)^{-dy/2}``,
    which is exact, so unnormalized kernel sums are used throughout.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    n = data.n
    if n < 10:
        raise ValueError(f"need at least 10 samples, got {n}")
    h = cfg.h(n, data.d)
    x, y = data.x, data.y
    s = -0.5 / (h * h)
    fxy = np.empty(n)
    fx = np.empty(n)
    fy = np.empty(n)
    for i0 in range(0, n, cfg.chunk):
        sl = slice(i0, min(i0 + cfg.chunk, n))
        kx = np.exp(s * _sqdist(x[sl], x))
        ky = np.exp(s * _sqdist(y[sl], y))
        fxy[sl] = np.einsum("ij,ij->i", kx, ky)
        fx[sl] = kx.sum(1)
        fy[sl] = ky.sum(1)
    # densities are the sums divided by n (and the cancelling constants)
    r = fxy * n / (fx * fy)
    return float(1.0 - np.mean(1.0 / (p * r + (1.0 - p))))


@dataclass(frozen=True)
class TruthOracle:
    """Zero-mean, unit-variance bivariate normal with correlation ``rho``."""

    rho: float
    p: float
    mc_samples: int = 1_000_000
    seed: int = 0
    batch: int = 250_000

    def __post_init__(self):
        if not -1.0 < self.rho < 1.0:
            raise ValueError(f"covariance is not positive definite (rho={self.rho})")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        if self.mc_samples < 1000:
            raise ValueError(f"mc_samples must be >= 1000, got {self.mc_samples}")


def gaussian_density_ratio(x: np.ndarray, y: np.ndarray, rho: float) -> np.ndarray:
    """``f_XY(x, y) / (f_X(x) f_Y(y))`` for the unit-variance bivariate normal."""
    s = 1.0 - rho * rho
    log_r = -0.5 * math.log(s) - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * s)
    return np.exp(log_r)


def mc_true_gmi(oracle: TruthOracle) -> tuple[float, float]:
    """``1 - E[1 / (p r(X, Y) + q)]`` by Monte Carlo; returns ``(value, std_error)``.

    Batches draw from independent streams keyed by batch index, so the
    result does not depend on how work is scheduled.
    """
    p, q, rho = oracle.p, 1.0 - oracle.p, oracle.rho
    chol = np.linalg.cholesky(np.array([[1.0, rho], [rho, 1.0]]))
    total = 0.0
    total_sq = 0.0
    done = 0
    k = 0
    while done < oracle.mc_samples:
        m = min(oracle.batch, oracle.mc_samples - done)
        z = rng_stream(oracle.seed, STREAM_MC, k).standard_normal((m, 2)) @ chol.T
        v = 1.0 / (p * gaussian_density_ratio(z[:, 0], z[:, 1], rho) + q)
        total += v.sum()
        total_sq += (v * v).sum()
        done += m
        k += 1
    n = oracle.mc_samples
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / (n - 1)
    return float(1.0 - mean), float(math.sqrt(var / n))
