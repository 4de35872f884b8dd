"""Friedman–Rafsky crossing-edge statistic and the randomized-shuffle GMI estimator."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .mst import SpanningTree, euclidean_mst
from .samples import PairedSampleSet, SplitShuffleConfig, split_and_shuffle

__all__ = [
    "FrStatistic",
    "GmiEstimate",
    "TrialSummary",
    "fr_statistic",
    "estimate_gmi",
    "estimate_gmi_trials",
]


@dataclass(frozen=True)
class FrStatistic:
    """Number ``r`` of tree edges joining the two groups, with group sizes."""

    r: int
    n1: int
    n2: int


@dataclass(frozen=True)
class GmiEstimate:
    value: float
    alpha: float
    r: int
    n_prime: int
    n_dprime: int
    seed: int
    clamped: bool = False

    @property
    def raw(self) -> float:
        """The unclamped estimate ``1 - r (n' + n'') / (2 n' n'')``."""
        return _formula(self.r, self.n_prime, self.n_dprime)

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "r": self.r,
            "n_prime": self.n_prime,
            "n_dprime": self.n_dprime,
            "alpha": self.alpha,
            "seed": self.seed,
        }


def _formula(r: int, n1: int, n2: int) -> float:
    return 1.0 - r * (n1 + n2) / (2.0 * n1 * n2)


def fr_statistic(tree: SpanningTree, labels: Sequence[int]) -> FrStatistic:
    """Count bichromatic edges of ``tree`` under a two-valued labelling.

    ``labels`` may use any two distinct values (conventionally 1 and 2);
    ``n1`` counts the smaller value.
    """
    lab = np.asarray(labels)
    if lab.ndim != 1 or lab.shape[0] != tree.n:
        raise ValueError(f"need one label per point ({tree.n}), got shape {lab.shape}")
    values = np.unique(lab)
    if values.size != 2:
        raise ValueError(f"labels must contain exactly two groups, found {values.size}")
    e = tree.edges
    r = int(np.count_nonzero(lab[e[:, 0]] != lab[e[:, 1]]))
    n1 = int(np.count_nonzero(lab == values[0]))
    return FrStatistic(r, n1, tree.n - n1)


def estimate_gmi(
    data: PairedSampleSet,
    cfg: SplitShuffleConfig,
    clamp: bool = False,
    *,
    backend: str = "auto",
    cutoff: int | None = None,
) -> GmiEstimate:
    """Estimate ``I_alpha(X; Y)`` from paired samples.

    The sample is split into a kept part of size ``n'`` and a part of size
    ``n''`` whose y-blocks are re-paired at random, so that it looks like a
    draw from the product of marginals.  The pooled ``n`` points are joined
    by a Euclidean MST and the ``r`` edges linking the two parts give
    ``1 - r (n' + n'') / (2 n' n'')``.
    """
    first, shuffled = split_and_shuffle(data, cfg)
    n1, n2 = first.n, shuffled.n
    pooled = np.vstack([first.points, shuffled.points])
    tree = euclidean_mst(pooled, backend=backend, cutoff=cutoff)
    labels = np.repeat([1, 2], [n1, n2])
    stat = fr_statistic(tree, labels)
    value = _formula(stat.r, n1, n2)
    if clamp:
        value = min(max(value, 0.0), 1.0)
    return GmiEstimate(value, cfg.alpha, stat.r, n1, n2, int(cfg.seed), clamp)


@dataclass(frozen=True)
class TrialSummary:
    estimates: tuple[GmiEstimate, ...]
    mean: float
    mse: float | None
    # standard error of the MSE (of the squared errors' mean)
    mse_stderr: float | None

    @property
    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.estimates])


def estimate_gmi_trials(
    generator: Callable[[int], PairedSampleSet],
    cfg: SplitShuffleConfig,
    trials: int,
    truth: float | None = None,
    *,
    clamp: bool = False,
    backend: str = "auto",
    cutoff: int | None = None,
) -> TrialSummary:
    """Repeat :func:`estimate_gmi` over ``trials`` independent datasets.

    Trial ``t`` uses seed ``cfg.seed + t`` both for ``generator(seed)`` and
    for the split/shuffle step.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    out = []
    for t in range(trials):
        seed = int(cfg.seed) + t
        data = generator(seed)
        out.append(estimate_gmi(data, cfg.with_seed(seed), clamp, backend=backend, cutoff=cutoff))
    vals = np.array([e.value for e in out])
    mse = se = None
    if truth is not None:
        sq = (vals - truth) ** 2
        mse = float(sq.mean())
        se = float(sq.std(ddof=1) / np.sqrt(trials)) if trials > 1 else float("nan")
    return TrialSummary(tuple(out), float(vals.mean()), mse, se)
