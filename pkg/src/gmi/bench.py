"""Experiment harness: MSE sweeps over (n, d, rho, alpha), runtime comparison
between the FR and KDE estimators, and theoretical rate envelopes."""
from __future__ import annotations

import csv
import enum
import io
import math
import time
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .alpha import KISSING_NUMBERS
from .baselines import KdeConfig, TruthOracle, kde_gmi, mc_true_gmi
from .fr import estimate_gmi
from .samples import GaussianSpec, ShuffleMode, SplitShuffleConfig, generate_gaussian, split_sizes

__all__ = [
    "Estimator",
    "TruthSource",
    "SweepPlan",
    "SweepRecord",
    "SweepResult",
    "run_sweep",
    "parse_plan",
    "load_plan",
    "loglog_slope",
    "RuntimeRecord",
    "runtime_compare",
    "EnvelopePoint",
    "theoretical_envelope",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("estimator", "d", "n", "rho", "alpha", "trials", "mean", "mse", "stderr", "seconds")


class Estimator(str, enum.Enum):
    FR = "fr"
    KDE = "kde"


class TruthSource(str, enum.Enum):
    ZERO = "zero"
    MONTE_CARLO = "mc"


def _tuple(v) -> tuple:
    if isinstance(v, (str, bytes)) or not isinstance(v, Iterable):
        return (v,)
    return tuple(v)


@dataclass(frozen=True)
class SweepPlan:
    """A grid of cells ``n x d x rho x alpha``, each run for ``trials`` datasets.

    For the KDE estimator ``alpha`` is used as the divergence parameter
    ``p``, so both estimators target the same ``I_alpha``.
    """

    estimator: Estimator = Estimator.FR
    n: tuple[int, ...] = (1000,)
    d: tuple[int, ...] = (2,)
    rho: tuple[float, ...] = (0.0,)
    alpha: tuple[float, ...] = (0.5,)
    trials: int = 100
    seed: int = 0
    truth: TruthSource = TruthSource.ZERO
    shuffle: ShuffleMode = ShuffleMode.PERMUTATION
    mc_samples: int = 1_000_000

    def __post_init__(self):
        object.__setattr__(self, "estimator", Estimator(self.estimator))
        object.__setattr__(self, "truth", TruthSource(self.truth))
        object.__setattr__(self, "shuffle", ShuffleMode(self.shuffle))
        for name, typ in (("n", int), ("d", int), ("rho", float), ("alpha", float)):
            vals = tuple(typ(v) for v in _tuple(getattr(self, name)))
            if not vals:
                raise ValueError(f"grid axis {name!r} is empty")
            object.__setattr__(self, name, vals)
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def cells(self) -> list[tuple[int, int, float, float]]:
        """Grid cells as ``(d, n, rho, alpha)`` in canonical order."""
        return [(d, n, r, a) for d in self.d for n in self.n for r in self.rho for a in self.alpha]


@dataclass(frozen=True)
class SweepRecord:
    estimator: str
    d: int
    n: int
    rho: float
    alpha: float
    trials: int
    mean: float
    mse: float
    # standard error of the MSE, i.e. std of the squared errors / sqrt(trials)
    stderr: float
    seconds: float
    skipped: str | None = None

    def row(self, timing: bool = True) -> list:
        vals = [self.estimator, self.d, self.n, self.rho, self.alpha, self.trials,
                self.mean, self.mse, self.stderr, self.seconds if timing else float("nan")]
        return [_fmt(v) for v in vals]


def _fmt(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


@dataclass(frozen=True)
class SweepResult:
    plan: SweepPlan
    records: tuple[SweepRecord, ...]

    def to_csv(self, fh=None, timing: bool = True) -> str | None:
        """Write the CSV table; returns it as a string when ``fh`` is None.

        With ``timing=False`` the seconds column is ``nan`` so the output is
        byte-identical across runs.
        """
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.records:
            w.writerow(r.row(timing))
        return buf.getvalue() if fh is None else None

    def select(self, **kw) -> list[SweepRecord]:
        return [r for r in self.records if all(getattr(r, k) == v for k, v in kw.items())]


def trial_seed(plan_seed: int, cell: int, trial: int) -> int:
    """64-bit seed for one trial, derived from ``(plan seed, cell, trial)``."""
    ss = np.random.SeedSequence(entropy=plan_seed, spawn_key=(cell, trial))
    return int(ss.generate_state(1, np.uint64)[0])


@lru_cache(maxsize=None)
def _mc_truth(rho: float, p: float, mc_samples: int, seed: int) -> float:
    return mc_true_gmi(TruthOracle(rho, p, mc_samples, seed))[0]


def _truth(plan: SweepPlan, rho: float, alpha: float) -> float:
    if plan.truth is TruthSource.ZERO:
        return 0.0
    return _mc_truth(rho, alpha, plan.mc_samples, plan.seed)


def _skip_reason(plan: SweepPlan, d: int, n: int, rho: float, alpha: float) -> str | None:
    if plan.estimator is Estimator.FR:
        try:
            split_sizes(n, alpha)
        except ValueError as exc:
            return str(exc)
    elif n < 10:
        return f"KDE needs n >= 10, got {n}"
    if not 0.0 < alpha < 1.0:
        return f"alpha must lie in (0, 1), got {alpha}"
    if rho != 0.0 and d != 2:
        return "a nonzero rho is only defined for d = 2"
    if plan.truth is TruthSource.MONTE_CARLO and d != 2:
        return "Monte-Carlo truth is only available for d = 2"
    if d < 2:
        return f"d must be >= 2, got {d}"
    return None


def _run_cell(plan: SweepPlan, idx: int, cell) -> SweepRecord:
    d, n, rho, alpha = cell
    nan = float("nan")
    reason = _skip_reason(plan, d, n, rho, alpha)
    if reason is not None:
        return SweepRecord(plan.estimator.value, d, n, rho, alpha, plan.trials, nan, nan, nan, nan, reason)
    truth = _truth(plan, rho, alpha)
    vals = np.empty(plan.trials)
    t0 = time.perf_counter()
    for t in range(plan.trials):
        seed = trial_seed(plan.seed, idx, t)
        data = generate_gaussian(GaussianSpec(d=d, n=n, rho=rho, seed=seed))
        if plan.estimator is Estimator.FR:
            vals[t] = estimate_gmi(data, SplitShuffleConfig(alpha, seed, plan.shuffle)).value
        else:
            vals[t] = kde_gmi(data, alpha)
    seconds = time.perf_counter() - t0
    sq = (vals - truth) ** 2
    se = float(sq.std(ddof=1) / math.sqrt(plan.trials)) if plan.trials > 1 else nan
    return SweepRecord(plan.estimator.value, d, n, rho, alpha, plan.trials,
                       float(vals.mean()), float(sq.mean()), se, seconds)


def run_sweep(plan: SweepPlan, workers: int = 1) -> SweepResult:
    """Run every cell of ``plan``; infeasible cells become NaN rows.

    Each cell's trials draw their seeds from ``(plan.seed, cell index,
    trial index)``, so results do not depend on ``workers``.
    """
    cells = plan.cells()
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(_run_cell, plan, i, c) for i, c in enumerate(cells)]
            records = [f.result() for f in futs]
    else:
        records = [_run_cell(plan, i, c) for i, c in enumerate(cells)]
    records.sort(key=lambda r: (r.d, r.n, r.rho, r.alpha))
    return SweepResult(plan, tuple(records))


# ----------------------------------------------------------------------------
# plan files


_PLAN_KEYS = {
    "estimator", "n", "d", "rho", "alpha", "trials", "seed", "truth", "shuffle", "mc_samples",
}


def _parse_values(text: str, typ) -> list:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = part.split(":")
            if len(bits) != 3:
                raise ValueError(f"range {part!r} must be start:stop:step")
            start, stop, step = (typ(b) for b in bits)
            if step <= 0:
                raise ValueError(f"range step must be positive in {part!r}")
            k = 0
            while True:
                v = start + k * step
                if v > stop + (1e-9 * abs(step) if typ is float else 0):
                    break
                out.append(round(v, 12) if typ is float else v)
                k += 1
        else:
            out.append(typ(part))
    if not out:
        raise ValueError(f"no values in {text!r}")
    return out


def parse_plan(text: str, **overrides) -> SweepPlan:
    """Parse ``key = value`` lines into a :class:`SweepPlan`.

    Grid keys (``n``, ``d``, ``rho``, ``alpha``) take comma lists whose
    items may be inclusive ranges ``start:stop:step``.  ``#`` starts a
    comment.
    """
    kw: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _PLAN_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in kw:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in ("n", "d"):
                kw[key] = tuple(_parse_values(val, int))
            elif key in ("rho", "alpha"):
                kw[key] = tuple(_parse_values(val, float))
            elif key in ("trials", "seed", "mc_samples"):
                kw[key] = int(val)
            else:
                kw[key] = val
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return SweepPlan(**kw)


def load_plan(path, **overrides) -> SweepPlan:
    with open(path) as fh:
        return parse_plan(fh.read(), **overrides)


def loglog_slope(ns: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of ``log(values)`` against ``log(ns)``."""
    x = np.log(np.asarray(ns, float))
    y = np.log(np.asarray(values, float))
    return float(np.polyfit(x, y, 1)[0])


# ----------------------------------------------------------------------------
# runtime


@dataclass(frozen=True)
class RuntimeRecord:
    n: int
    fr_time: float
    kde_time: float | None


def _median_time(fn, repeats: int) -> float:
    ts = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t0)
    return float(np.median(ts))


def runtime_compare(
    n_grid: Sequence[int],
    d: int = 2,
    seed: int = 0,
    repeats: int = 3,
    alpha: float = 0.5,
    kde: bool = True,
) -> list[RuntimeRecord]:
    """Median wall time of one FR estimate and one KDE estimate per ``n``."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    if list(n_grid) != sorted(n_grid):
        raise ValueError("n grid must be ascending")
    out = []
    for n in n_grid:
        data = generate_gaussian(GaussianSpec(d=d, n=n, seed=seed))
        cfg = SplitShuffleConfig(alpha, seed)
        fr_t = _median_time(lambda: estimate_gmi(data, cfg), repeats)
        kde_t = _median_time(lambda: kde_gmi(data, alpha), repeats) if kde else None
        out.append(RuntimeRecord(int(n), fr_t, kde_t))
    return out


# ----------------------------------------------------------------------------
# rate envelopes


@dataclass(frozen=True)
class EnvelopePoint:
    n: int
    bias_terms: tuple[float, float, float]
    bias: float
    variance: float


def theoretical_envelope(
    n_grid: Sequence[int], d: int, eta: float, alpha: float, c_d: float | None = None
) -> list[EnvelopePoint]:
    """Bias and variance rate curves with unit leading constants.

    bias     = max(n^(-eta^2/(d(1+eta))), (beta n)^(-eta/(1+eta)), c_d 2^d / n)
    variance = (1 - alpha) c_d / n
    """
    if not 0 < eta <= 1:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    if not 0 <= alpha < 1:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    if c_d is None:
        if d not in KISSING_NUMBERS:
            raise ValueError(f"no default c_d for d={d}; supply c_d")
        c_d = float(KISSING_NUMBERS[d])
    beta = 1.0 - alpha
    out = []
    for n in n_grid:
        terms = (
            n ** (-(eta**2) / (d * (1 + eta))),
            (beta * n) ** (-eta / (1 + eta)),
            c_d * 2.0**d / n,
        )
        out.append(EnvelopePoint(int(n), terms, max(terms), (1 - alpha) * c_d / n))
    return out
