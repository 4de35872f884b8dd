"""Henze–Penrose divergence, geometric mutual information and affinity on
discrete distributions, plus randomized property sweeps.

Sums over atoms stand in for integrals over densities.  Atoms where the
mixture ``p f + q g`` vanishes contribute nothing (both densities are zero
there).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

__all__ = [
    "HpParams",
    "DiscreteJoint",
    "ConditionalJoint",
    "hp_divergence",
    "affinity",
    "gmi",
    "u_p",
    "conditional_gmi",
    "chain_rule_gap",
    "data_processing_gap",
    "mixture_marginal_check",
    "mixture_channel_check",
    "MixtureCheck",
    "ChainRuleGap",
    "DataProcessingGap",
    "random_pmf",
    "random_joint",
    "random_tensor",
    "random_markov",
    "property_sweep",
    "gaussian_grid_gmi",
]

PMF_TOL = 1e-12


@dataclass(frozen=True)
class HpParams:
    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")

    @property
    def q(self) -> float:
        return 1.0 - self.p


def _as_params(params) -> HpParams:
    return params if isinstance(params, HpParams) else HpParams(float(params))


def _check_pmf(a, name: str, ndim: int | None = None) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if ndim is not None and a.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {a.shape}")
    if a.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(a)) or np.any(a < 0):
        raise ValueError(f"{name} must be finite and nonnegative")
    s = a.sum()
    if abs(s - 1.0) > PMF_TOL * max(1, a.size):
        raise ValueError(f"{name} must sum to 1, sums to {s!r}")
    return a


@dataclass(frozen=True)
class DiscreteJoint:
    """Joint pmf of ``(X, Y)`` as a ``kx x ky`` table."""

    pmf: np.ndarray

    def __post_init__(self):
        a = _check_pmf(self.pmf, "joint pmf", 2)
        a.setflags(write=False)
        object.__setattr__(self, "pmf", a)

    @property
    def px(self) -> np.ndarray:
        return self.pmf.sum(axis=1)

    @property
    def py(self) -> np.ndarray:
        return self.pmf.sum(axis=0)

    @property
    def product(self) -> np.ndarray:
        return np.outer(self.px, self.py)


@dataclass(frozen=True)
class ConditionalJoint:
    """Joint pmf of three variables as a ``k1 x k2 x k3`` tensor."""

    pmf: np.ndarray

    def __post_init__(self):
        a = _check_pmf(self.pmf, "joint pmf", 3)
        a.setflags(write=False)
        object.__setattr__(self, "pmf", a)


def _joint(j) -> DiscreteJoint:
    return j if isinstance(j, DiscreteJoint) else DiscreteJoint(j)


def _tensor(t) -> ConditionalJoint:
    return t if isinstance(t, ConditionalJoint) else ConditionalJoint(t)


def _safe_div(num, den):
    out = np.zeros(np.broadcast(num, den).shape)
    np.divide(num, den, out=out, where=den > 0)
    return out


def hp_divergence(f, g, params) -> float:
    """``D_p(f, g) = [sum (p f - q g)^2 / (p f + q g) - (p - q)^2] / (4 p q)``."""
    pr = _as_params(params)
    p, q = pr.p, pr.q
    f = _check_pmf(f, "f").ravel()
    g = _check_pmf(g, "g").ravel()
    if f.shape != g.shape:
        raise ValueError(f"f and g differ in size: {f.size} vs {g.size}")
    s = float(np.sum(_safe_div((p * f - q * g) ** 2, p * f + q * g)))
    return (s - (p - q) ** 2) / (4.0 * p * q)


def _affinity_arrays(fxy: np.ndarray, prod: np.ndarray, p: float) -> float:
    return float(np.sum(_safe_div(fxy * prod, p * fxy + (1.0 - p) * prod)))


def affinity(joint, params) -> float:
    """``A_p = sum f_XY f_X f_Y / (p f_XY + q f_X f_Y)``, in ``[0, 1]``."""
    j = _joint(joint)
    return _affinity_arrays(j.pmf, j.product, _as_params(params).p)


def gmi(joint, params) -> float:
    """``I_p(X; Y) = D_p(f_XY, f_X f_Y)``.

    Also evaluated as ``1 - A_p``; the two routes must agree.
    """
    j = _joint(joint)
    pr = _as_params(params)
    val = hp_divergence(j.pmf, j.product, pr)
    alt = 1.0 - affinity(j, pr)
    if abs(val - alt) > 1e-9:
        raise ArithmeticError(f"divergence and affinity routes disagree: {val!r} vs {alt!r}")
    return val


def u_p(joint, params) -> float:
    """``u_p = 1 - 4 p q A_p``; then ``I_p = u_p / (4pq) - (p - q)^2 / (4pq)``."""
    pr = _as_params(params)
    return 1.0 - 4.0 * pr.p * pr.q * affinity(joint, pr)


def conditional_gmi(joint, params) -> float:
    """``E_Z[I_p(X; Y | Z = z)]`` for a tensor indexed ``[x, y, z]``."""
    t = _tensor(joint).pmf
    p = _as_params(params).p
    fz = t.sum(axis=(0, 1))
    total = 0.0
    for k in np.flatnonzero(fz > 0):
        sl = t[:, :, k] / fz[k]
        prod = np.outer(sl.sum(axis=1), sl.sum(axis=0))
        total += fz[k] * (1.0 - _affinity_arrays(sl, prod, p))
    return float(total)


class ChainRuleGap(NamedTuple):
    lhs: float  # I_p(X1, X2; Y)
    rhs: float  # I_p(X1; Y)
    delta: float

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs - self.delta

    @property
    def slack(self) -> float:
        return self.lhs - (self.rhs - self.delta)


def chain_rule_gap(joint, params) -> ChainRuleGap:
    """Terms of ``I_p(X1,X2; Y) >= I_p(X1; Y) - delta`` for a tensor ``[x1, x2, y]``.

    ``delta = E[(p r + q)^{-1}]`` with ``r = f(x1,x2,y) f(x1) / (f(x1,x2) f(x1,y))``,
    the conditional dependence ratio of ``X2`` and ``Y`` given ``X1``.
    """
    t = _tensor(joint).pmf
    pr = _as_params(params)
    k1, k2, ky = t.shape
    lhs = gmi(t.reshape(k1 * k2, ky), pr)
    rhs = gmi(t.sum(axis=1), pr)
    f1 = t.sum(axis=(1, 2))[:, None, None]
    f12 = t.sum(axis=2)[:, :, None]
    f1y = t.sum(axis=1)[:, None, :]
    ratio = _safe_div(t * f1, f12 * f1y)
    # delta = sum f / (p r + q) over the support, written to avoid 0/0
    inner = _safe_div(t, pr.p * ratio + pr.q)
    delta = float(np.sum(np.where(t > 0, inner, 0.0)))
    return ChainRuleGap(lhs, rhs, delta)


class DataProcessingGap(NamedTuple):
    lhs: float  # I_p(Y; X)
    rhs: float  # I_p(Z; X) - (p E[delta] + q)^{-1}
    slack: float


MARKOV_TOL = 1e-10


def data_processing_gap(joint, params) -> DataProcessingGap:
    """Terms of ``I_p(Y; X) >= I_p(Z; X) - (p E[delta] + q)^{-1}``.

    ``joint`` is indexed ``[x, y, z]`` and must factor as
    ``f(x|y) f(y, z)``, i.e. ``X -> Y -> Z`` is a Markov chain.
    ``E[delta] = sum f(x, y, z) f(x|y) / f(x|z)``.
    """
    t = _tensor(joint).pmf
    pr = _as_params(params)
    fxy = t.sum(axis=2)
    fy = t.sum(axis=(0, 2))
    fyz = t.sum(axis=0)
    fz = t.sum(axis=(0, 1))
    fxz = t.sum(axis=1)
    x_given_y = _safe_div(fxy, fy[None, :])
    resid = np.max(np.abs(t - x_given_y[:, :, None] * fyz[None, :, :]))
    if resid > MARKOV_TOL:
        raise ValueError(f"input is not Markov X -> Y -> Z (factorization residual {resid:.3g})")
    x_given_z = _safe_div(fxz, fz[None, :])
    w = _safe_div(x_given_y[:, :, None], x_given_z[:, None, :])
    e_delta = float(np.sum(np.where(t > 0, t * w, 0.0)))
    lhs = gmi(fxy.T, pr)
    rhs = gmi(fxz.T, pr) - 1.0 / (pr.p * e_delta + pr.q)
    return DataProcessingGap(lhs, rhs, lhs - rhs)


class MixtureCheck(NamedTuple):
    lhs: float  # GMI of the mixture
    rhs: float  # mixture of GMIs

    @property
    def gap(self) -> float:
        return self.lhs - self.rhs


def _check_weight(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"mixture weight must lie in [0, 1], got {lam}")
    return lam


def _check_channel(ch, name: str) -> np.ndarray:
    ch = np.asarray(ch, dtype=np.float64)
    if ch.ndim != 2 or np.any(ch < 0) or np.any(np.abs(ch.sum(axis=1) - 1) > PMF_TOL * ch.shape[1]):
        raise ValueError(f"{name} must be a row-stochastic matrix")
    return ch


def mixture_marginal_check(channel, g, h, lam: float, params) -> MixtureCheck:
    """GMI under a mixed input law vs the mixed GMIs, channel held fixed.

    Concavity in the input law would mean ``lhs >= rhs``.
    """
    lam = _check_weight(lam)
    ch = _check_channel(channel, "channel")
    g = _check_pmf(g, "g", 1)
    h = _check_pmf(h, "h", 1)
    mix = lam * g + (1 - lam) * h
    lhs = gmi(ch * mix[:, None], params)
    rhs = lam * gmi(ch * g[:, None], params) + (1 - lam) * gmi(ch * h[:, None], params)
    return MixtureCheck(lhs, rhs)


def mixture_channel_check(fx, g_channel, h_channel, lam: float, params) -> MixtureCheck:
    """GMI under a mixed channel vs the mixed GMIs, input law held fixed.

    Convexity in the channel means ``lhs <= rhs``.
    """
    lam = _check_weight(lam)
    fx = _check_pmf(fx, "fx", 1)
    g = _check_channel(g_channel, "g_channel")
    h = _check_channel(h_channel, "h_channel")
    lhs = gmi((lam * g + (1 - lam) * h) * fx[:, None], params)
    rhs = lam * gmi(g * fx[:, None], params) + (1 - lam) * gmi(h * fx[:, None], params)
    return MixtureCheck(lhs, rhs)


# ----------------------------------------------------------------------------
# random instances


def random_pmf(rng: np.random.Generator, k: int) -> np.ndarray:
    return rng.dirichlet(np.ones(k))


def random_joint(rng: np.random.Generator, kx: int, ky: int) -> np.ndarray:
    return rng.dirichlet(np.ones(kx * ky)).reshape(kx, ky)


def random_tensor(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)


def random_markov(rng: np.random.Generator, kx: int, ky: int, kz: int) -> np.ndarray:
    """Tensor ``[x, y, z] = f(x|y) f(y|z) f(z)`` with Dirichlet factors."""
    fz = rng.dirichlet(np.ones(kz))
    y_given_z = rng.dirichlet(np.ones(ky), size=kz).T  # [y, z]
    x_given_y = rng.dirichlet(np.ones(kx), size=ky).T  # [x, y]
    return x_given_y[:, :, None] * y_given_z[None, :, :] * fz[None, None, :]


@dataclass
class _Tally:
    instances: int = 0
    violations: int = 0
    worst: float = 0.0
    counterexample: dict | None = None

    def add(self, violation: float, tol: float, example) -> None:
        """``violation`` is the amount by which the property fails (<= 0 is fine)."""
        self.instances += 1
        if violation > tol:
            self.violations += 1
            if violation > self.worst:
                self.worst = violation
                self.counterexample = example() if callable(example) else example

    def report(self) -> dict:
        out = {"instances": self.instances, "violations": self.violations, "worst": self.worst}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


PROPERTIES = (
    "range",
    "self_zero",
    "positive",
    "swap_symmetry",
    "affinity_identity",
    "u_identity",
    "concavity_marginal",
    "convexity_channel",
    "chain_rule",
    "delta_bound",
    "delta_unit_interval",
    "data_processing",
)


def property_sweep(n: int = 1000, seed: int = 0, tol: float = 1e-12, kmax: int = 5) -> dict:
    """Check every divergence property on ``n`` random instances each.

    Returns ``{"passed": bool, "properties": {name: {instances, violations,
    worst, [counterexample]}}}``; ``worst`` is the largest violation amount.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(7,)))
    tal = {name: _Tally() for name in PROPERTIES}
    lst = lambda a: np.asarray(a).tolist()  # noqa: E731

    for _ in range(n):
        p = float(rng.uniform(0.02, 0.98))
        pr = HpParams(p)
        k = int(rng.integers(2, kmax + 1))
        f, g = random_pmf(rng, k), random_pmf(rng, k)

        d = hp_divergence(f, g, pr)
        tal["range"].add(max(-d, d - 1.0), tol, lambda: {"p": p, "f": lst(f), "g": lst(g), "D": d})
        d0 = hp_divergence(f, f, pr)
        tal["self_zero"].add(abs(d0), tol, lambda: {"p": p, "f": lst(f), "D": d0})
        if np.max(np.abs(f - g)) > 1e-9:
            tal["positive"].add(0.0 if d > 0 else 1.0, tol, lambda: {"p": p, "f": lst(f), "g": lst(g)})
        ds = hp_divergence(g, f, HpParams(1.0 - p))
        tal["swap_symmetry"].add(abs(d - ds), tol, lambda: {"p": p, "f": lst(f), "g": lst(g)})

        kx, ky = (int(v) for v in rng.integers(2, kmax + 1, size=2))
        j = DiscreteJoint(random_joint(rng, kx, ky))
        a = affinity(j, pr)
        i_div = hp_divergence(j.pmf, j.product, pr)
        tal["affinity_identity"].add(abs(i_div - (1.0 - a)), tol, lambda: {"p": p, "joint": lst(j.pmf)})
        u = u_p(j, pr)
        i_u = u / (4 * p * pr.q) - (p - pr.q) ** 2 / (4 * p * pr.q)
        tal["u_identity"].add(abs(i_u - i_div), tol, lambda: {"p": p, "joint": lst(j.pmf)})

        lam = float(rng.uniform())
        ch = rng.dirichlet(np.ones(ky), size=kx)
        gx, hx = random_pmf(rng, kx), random_pmf(rng, kx)
        mc = mixture_marginal_check(ch, gx, hx, lam, pr)
        tal["concavity_marginal"].add(
            -mc.gap, tol,
            lambda: {"p": p, "lam": lam, "channel": lst(ch), "g": lst(gx), "h": lst(hx),
                     "lhs": mc.lhs, "rhs": mc.rhs},
        )
        ch2 = rng.dirichlet(np.ones(ky), size=kx)
        cc = mixture_channel_check(gx, ch, ch2, lam, pr)
        tal["convexity_channel"].add(
            cc.gap, tol,
            lambda: {"p": p, "lam": lam, "fx": lst(gx), "g_channel": lst(ch), "h_channel": lst(ch2),
                     "lhs": cc.lhs, "rhs": cc.rhs},
        )

        shape = tuple(int(v) for v in rng.integers(2, kmax, size=3))
        t = random_tensor(rng, shape)
        cr = chain_rule_gap(t, pr)
        tal["chain_rule"].add(-cr.slack, tol, lambda: {"p": p, "tensor": lst(t), **cr._asdict()})
        tal["delta_bound"].add(max(-cr.delta, cr.delta - 1.0 / pr.q), tol, lambda: {"p": p, "tensor": lst(t)})
        tal["delta_unit_interval"].add(max(-cr.delta, cr.delta - 1.0), tol, lambda: {"p": p, "tensor": lst(t)})

        shape = tuple(int(v) for v in rng.integers(2, kmax, size=3))
        m = random_markov(rng, *shape)
        dp = data_processing_gap(m, pr)
        tal["data_processing"].add(-dp.slack, tol, lambda: {"p": p, "tensor": lst(m), **dp._asdict()})

    props = {name: tal[name].report() for name in PROPERTIES}
    return {
        "passed": all(v["violations"] == 0 for v in props.values()),
        "instances": n,
        "seed": seed,
        "tolerance": tol,
        "properties": props,
    }


def gaussian_grid_gmi(rho: float, p: float, grid: int = 400, lim: float = 5.0) -> float:
    """GMI of the unit-variance bivariate normal with correlation ``rho``.

    The density is evaluated at the midpoints of a ``grid x grid`` lattice
    over ``[-lim, lim]^2``, renormalized to a pmf and passed to :func:`gmi`.
    """
    if not -1.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (-1, 1), got {rho}")
    edges = np.linspace(-lim, lim, grid + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x, y = np.meshgrid(mid, mid, indexing="ij")
    s = 1.0 - rho * rho
    logf = -(x * x - 2 * rho * x * y + y * y) / (2 * s)
    f = np.exp(logf - logf.max())
    return gmi(f / f.sum(), p)
