"""Minimax choice of the proportionality parameter ``alpha``.

The estimator's MSE is bounded by a surrogate

    objective(alpha) = D + D~ * C^U_XY * V * G~(eps*, alpha) + c_d (1 - alpha) / n

where ``D`` and ``D~`` depend only on ``n``, ``d`` and ``eta``; ``G~`` is a
rational function of the density ratio ``eps`` and ``alpha``; and the
worst-case ratio is ``eps* = C^U_eps``.  ``alpha`` is searched on the
feasible interval ``[alpha_lo, alpha_hi]`` using the sign of the derivative
``xi(alpha)`` at its ends.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

__all__ = [
    "DensityBounds",
    "RateConstants",
    "AlphaCase",
    "AlphaSolution",
    "InfeasibleIntervalError",
    "KISSING_NUMBERS",
    "alpha_bounds",
    "l_n",
    "d_term",
    "dbar_term",
    "g_tilde",
    "dg_dalpha",
    "delta_tilde",
    "objective",
    "xi",
    "select_alpha",
    "grid_minimizer",
    "truncated_gaussian_bounds",
]

Form = Literal["ratio", "inverse_ratio"]

# Largest known kissing numbers; they bound the maximal vertex degree of a
# Euclidean MST in dimension d and serve as the default for c_d.
KISSING_NUMBERS = {
    1: 2, 2: 6, 3: 12, 4: 24, 5: 40, 6: 72, 7: 126, 8: 240, 9: 306, 10: 510,
    11: 593, 12: 840, 13: 1154, 14: 1932, 15: 2564, 16: 4320, 17: 5346,
    18: 7398, 19: 10668, 20: 17400, 21: 27720, 22: 49896, 23: 93150, 24: 196560,
}


class InfeasibleIntervalError(ValueError):
    """The feasible ``alpha`` interval is empty."""


@dataclass(frozen=True)
class DensityBounds:
    """Lower/upper bounds on the joint and marginal densities over the support.

    ``volume`` is the Lebesgue measure of the joint support, ``eta`` the
    Hölder smoothness and ``n`` the sample size.
    """

    cl_xy: float
    cu_xy: float
    cl_x: float
    cu_x: float
    cl_y: float
    cu_y: float
    eta: float
    d: int
    volume: float
    n: int

    def __post_init__(self):
        for name in ("cl_xy", "cu_xy", "cl_x", "cu_x", "cl_y", "cu_y", "volume"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number, got {v}")
        for lo, hi in (("cl_xy", "cu_xy"), ("cl_x", "cu_x"), ("cl_y", "cu_y")):
            if getattr(self, lo) > getattr(self, hi):
                raise ValueError(f"{lo} must not exceed {hi}")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"d must be an integer >= 2, got {self.d}")
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        # both densities integrate to one, so the ratio crosses 1 somewhere
        if self.eps_lo > 1.0 + 1e-12 or self.eps_hi < 1.0 - 1e-12:
            raise ValueError(
                f"inconsistent bounds: need C^L_eps <= 1 <= C^U_eps, got "
                f"[{self.eps_lo:.6g}, {self.eps_hi:.6g}]"
            )

    @property
    def c_n(self) -> float:
        return self.cl_xy * self.n / 2.0

    @property
    def eps_lo(self) -> float:
        """``C^L_eps = cl_xy / (cu_x cu_y)``."""
        return self.cl_xy / (self.cu_x * self.cu_y)

    @property
    def eps_hi(self) -> float:
        """``C^U_eps = cu_xy / (cl_x cl_y)``."""
        return self.cu_xy / (self.cl_x * self.cl_y)

    def with_n(self, n: int) -> "DensityBounds":
        return replace(self, n=n)


@dataclass(frozen=True)
class RateConstants:
    """Constants of the bias/variance rate terms.

    ``c_d=None`` means the kissing number for the dimension.  ``a`` and
    ``b`` default to all-ones vectors of length ``l_n^d``; custom vectors must
    satisfy ``sum(a) l^-d = sum(b) l^-d = 1``.
    """

    c: float = 1.0
    c_prime: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    c_dprime: float = 1.0
    c1_prime: float = 1.0
    c_d: float | None = None
    a: tuple[float, ...] | None = None
    b: tuple[float, ...] | None = None

    def __post_init__(self):
        for name in ("c", "c_prime", "c1", "c2", "c_dprime", "c1_prime"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive, got {v}")
        if self.c_d is not None and not self.c_d > 0:
            raise ValueError(f"c_d must be positive, got {self.c_d}")
        if (self.a is None) != (self.b is None):
            raise ValueError("a and b must be given together")
        if self.a is not None:
            a, b = np.asarray(self.a, float), np.asarray(self.b, float)
            if a.shape != b.shape or a.ndim != 1:
                raise ValueError("a and b must be 1-d of equal length")
            if np.any(a <= 0) or np.any(a > b):
                raise ValueError("need 0 < a_i <= b_i")
            object.__setattr__(self, "a", tuple(a.tolist()))
            object.__setattr__(self, "b", tuple(b.tolist()))

    def cd_for(self, d: int) -> float:
        if self.c_d is not None:
            return float(self.c_d)
        try:
            return float(KISSING_NUMBERS[int(d)])
        except KeyError:
            raise ValueError(f"no default c_d for d={d}; supply c_d explicitly") from None

    def weights(self, l: int, d: int) -> tuple[np.ndarray, np.ndarray]:
        m = l**d
        if self.a is None:
            return np.ones(m), np.ones(m)
        a, b = np.asarray(self.a), np.asarray(self.b)
        for name, v in (("a", a), ("b", b)):
            s = v.sum() / m
            if abs(s - 1.0) > 1e-12:
                raise ValueError(f"sum({name}) * l^-d must equal 1, got {s!r}")
        return a, b


class AlphaCase(str, enum.Enum):
    LOWER_BOUND = "LowerBound"
    UPPER_BOUND = "UpperBound"
    INTERIOR_ROOT = "InteriorRoot"


@dataclass(frozen=True)
class AlphaSolution:
    alpha_tilde: float
    case: AlphaCase
    alpha_lo: float
    alpha_hi: float
    xi_lo: float
    xi_hi: float
    warning: str | None = None

    def as_dict(self) -> dict:
        out = {
            "alpha_tilde": self.alpha_tilde,
            "case": self.case.value,
            "interval": [self.alpha_lo, self.alpha_hi],
            "xi_endpoints": [self.xi_lo, self.xi_hi],
        }
        if self.warning:
            out["warning"] = self.warning
        return out


def alpha_bounds(bounds: DensityBounds) -> tuple[float, float]:
    """Feasible interval ``[2/C_n, min(1/4, (1+1/C_n)/(4+2 C^U_eps), 1 - n^(eta/d-1))]``."""
    cn = bounds.c_n
    lo = 2.0 / cn
    hi = min(
        0.25,
        (1.0 + 1.0 / cn) / (4.0 + 2.0 * bounds.eps_hi),
        1.0 - bounds.n ** (bounds.eta / bounds.d - 1.0),
    )
    if not lo < hi:
        raise InfeasibleIntervalError(
            f"empty alpha interval [{lo:.6g}, {hi:.6g}] (C_n={cn:.6g}, C^U_eps={bounds.eps_hi:.6g}); "
            "n is too small for these density bounds"
        )
    return lo, hi


def l_n(n: int, eta: float, d: int) -> int:
    """``floor(n ** (eta / (d^2 (1 + eta))))``, robust to round-off at exact powers."""
    x = n ** (eta / (d * d * (1.0 + eta)))
    r = round(x)
    return int(r) if abs(x - r) < 1e-9 else int(math.floor(x))


def _l(bounds: DensityBounds) -> int:
    l = l_n(bounds.n, bounds.eta, bounds.d)
    if l < 1:
        raise ValueError(f"l_n = 0 for n={bounds.n}, eta={bounds.eta}, d={bounds.d}")
    return l


def d_term(bounds: DensityBounds, consts: RateConstants) -> float:
    n, d, eta = bounds.n, bounds.d, bounds.eta
    l = _l(bounds)
    ld = float(l) ** d
    return (
        consts.c2 * ld / n
        + consts.cd_for(d) * 2.0**d / n
        + consts.c_prime * ld * n ** (-eta / d)
        + consts.c * ld * n ** (-1.0 / d)
        + 2.0 * consts.c1 * float(l) ** (d - 1) * n ** (1.0 / d - 1.0)
    )


def dbar_term(bounds: DensityBounds, consts: RateConstants) -> float:
    n, d = float(bounds.n), bounds.d
    l = _l(bounds)
    a, b = consts.weights(l, d)
    lf = float(l)
    ld = lf**d
    t1 = 2.0 * consts.c_dprime / n * np.sum(lf * ld / a)
    t2 = 2.0 * consts.c1_prime * n**-1.5 * np.sum(lf * lf ** (d / 2) * np.sqrt(b) * a**2)
    t3 = (1.0 / n) * np.sum(
        2.0 * n**-1.5 * lf ** (-d / 2) * np.sqrt(b) / a**2
        * np.sqrt(n * a * ld + n * n * a * a)
        * np.sqrt(n * b * ld + n * n * b * b)
    )
    return float(2.0 + t1 + t2 + t3)


def _cn(bounds) -> float:
    return bounds.c_n if isinstance(bounds, DensityBounds) else float(bounds)


def g_tilde(eps, alpha, bounds, form: Form = "ratio"):
    """Bound kernel ``G~`` as a function of the density ratio ``eps``.

    ``form="ratio"`` (default): ``(1 + u eps)(1 + eps + u eps) / (alpha eps + beta)^2``.
    ``form="inverse_ratio"``: the same expression evaluated at ``1/eps``,
    ``(eps + u)(1 + eps + u) / (alpha + beta eps)^2``.
    Here ``beta = 1 - alpha`` and ``u = 1 / (beta C_n)``.  ``bounds`` may be a
    :class:`DensityBounds` or ``C_n`` itself (``inf`` allowed).
    """
    eps = np.asarray(eps, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    beta = 1.0 - alpha
    u = 1.0 / (beta * _cn(bounds))
    if form == "ratio":
        out = (1 + u * eps) * (1 + eps + u * eps) / (alpha * eps + beta) ** 2
    elif form == "inverse_ratio":
        out = (eps + u) * (1 + eps + u) / (alpha + beta * eps) ** 2
    else:
        raise ValueError(f"unknown form {form!r}")
    return out[()] if out.ndim == 0 else out


def dg_dalpha(eps, alpha, bounds, form: Form = "ratio"):
    """Closed-form ``d G~ / d alpha`` (``u`` depends on alpha through beta)."""
    eps = np.asarray(eps, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    beta = 1.0 - alpha
    u = 1.0 / (beta * _cn(bounds))
    du = u / beta
    if form == "ratio":
        n1 = 1 + u * eps
        n2 = 1 + eps + u * eps
        den = alpha * eps + beta
        out = du * eps * (n1 + n2) / den**2 - 2 * n1 * n2 * (eps - 1) / den**3
    elif form == "inverse_ratio":
        n1 = eps + u
        n2 = 1 + eps + u
        den = alpha + beta * eps
        out = du * (n1 + n2) / den**2 - 2 * n1 * n2 * (1 - eps) / den**3
    else:
        raise ValueError(f"unknown form {form!r}")
    return out[()] if out.ndim == 0 else out


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def delta_tilde(
    alpha: float,
    eps_star: float,
    bounds: DensityBounds,
    consts: RateConstants = RateConstants(),
    form: Form = "ratio",
) -> float:
    """``D + D~ C^U_XY V G~(eps_star, alpha)`` (constant ratio over the support)."""
    alpha = _check_alpha(alpha)
    return d_term(bounds, consts) + dbar_term(bounds, consts) * bounds.cu_xy * bounds.volume * float(
        g_tilde(eps_star, alpha, bounds, form)
    )


def objective(
    alpha: float, bounds: DensityBounds, consts: RateConstants = RateConstants(), form: Form = "ratio"
) -> float:
    """MSE surrogate at ``eps* = C^U_eps``, including the ``c_d (1 - alpha)/n`` term."""
    return delta_tilde(alpha, bounds.eps_hi, bounds, consts, form) + consts.cd_for(bounds.d) * (
        1.0 - alpha
    ) / bounds.n


def xi(
    alpha: float, bounds: DensityBounds, consts: RateConstants = RateConstants(), form: Form = "ratio"
) -> float:
    """``d objective / d alpha``, evaluated in closed form."""
    alpha = _check_alpha(alpha)
    scale = dbar_term(bounds, consts) * bounds.cu_xy * bounds.volume
    return scale * float(dg_dalpha(bounds.eps_hi, alpha, bounds, form)) - consts.cd_for(bounds.d) / bounds.n


def grid_minimizer(
    bounds: DensityBounds,
    consts: RateConstants = RateConstants(),
    form: Form = "ratio",
    points: int = 10_000,
) -> float:
    """Minimizer of :func:`objective` over an evenly spaced grid on the feasible interval."""
    lo, hi = alpha_bounds(bounds)
    grid = np.linspace(lo, hi, points)
    scale = dbar_term(bounds, consts) * bounds.cu_xy * bounds.volume
    vals = scale * g_tilde(bounds.eps_hi, grid, bounds, form) + consts.cd_for(bounds.d) * (1 - grid) / bounds.n
    return float(grid[int(np.argmin(vals))])


def select_alpha(
    bounds: DensityBounds,
    consts: RateConstants = RateConstants(),
    form: Form = "ratio",
    *,
    xtol: float = 1e-12,
    ftol: float = 1e-10,
    max_iter: int = 200,
) -> AlphaSolution:
    """Saddle-point ``alpha`` on the feasible interval.

    * ``xi(alpha_lo) >= 0`` -> ``alpha_lo`` (objective increasing at the left end)
    * ``xi(alpha_hi) <= 0`` -> ``alpha_hi``
    * otherwise bisection on the sign change of ``xi``.

    If both end conditions hold at once the objective is not convex on the
    interval; the grid minimizer is returned with a warning.
    """
    lo, hi = alpha_bounds(bounds)
    xl = xi(lo, bounds, consts, form)
    xh = xi(hi, bounds, consts, form)
    if xl >= 0 and xh <= 0:
        a = grid_minimizer(bounds, consts, form)
        case = AlphaCase.LOWER_BOUND if a == lo else AlphaCase.UPPER_BOUND if a == hi else AlphaCase.INTERIOR_ROOT
        return AlphaSolution(
            a, case, lo, hi, xl, xh,
            warning="derivative is non-negative at the lower end and non-positive at the upper end; "
            "objective is not convex here, returned the grid-scan minimizer",
        )
    if xl >= 0:
        return AlphaSolution(lo, AlphaCase.LOWER_BOUND, lo, hi, xl, xh)
    if xh <= 0:
        return AlphaSolution(hi, AlphaCase.UPPER_BOUND, lo, hi, xl, xh)
    a, b = lo, hi
    mid = 0.5 * (a + b)
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        xm = xi(mid, bounds, consts, form)
        if abs(xm) < ftol or b - a < xtol:
            break
        if xm < 0:
            a = mid
        else:
            b = mid
    return AlphaSolution(mid, AlphaCase.INTERIOR_ROOT, lo, hi, xl, xh)


def truncated_gaussian_bounds(
    rho: float, half_width: float, n: int, eta: float = 1.0, grid: int = 401
) -> DensityBounds:
    """Density bounds for a unit-variance bivariate normal restricted to
    ``[-w, w]^2`` and renormalized there.

    Joint and marginal densities are evaluated in closed form on a
    ``grid x grid`` lattice (which includes the box corners and centre).
    """
    from scipy.stats import multivariate_normal, norm

    if not -1.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (-1, 1), got {rho}")
    w = float(half_width)
    if w <= 0:
        raise ValueError("half_width must be positive")
    cov = [[1.0, rho], [rho, 1.0]]
    mvn = multivariate_normal(mean=[0.0, 0.0], cov=cov)
    mass = float(mvn.cdf([w, w], lower_limit=[-w, -w]))
    t = np.linspace(-w, w, grid)
    xx, yy = np.meshgrid(t, t, indexing="ij")
    joint = mvn.pdf(np.dstack([xx, yy])) / mass
    s = math.sqrt(1.0 - rho * rho)
    marg = norm.pdf(t) * (norm.cdf((w - rho * t) / s) - norm.cdf((-w - rho * t) / s)) / mass
    return DensityBounds(
        cl_xy=float(joint.min()),
        cu_xy=float(joint.max()),
        cl_x=float(marg.min()),
        cu_x=float(marg.max()),
        cl_y=float(marg.min()),
        cu_y=float(marg.max()),
        eta=eta,
        d=2,
        volume=(2 * w) ** 2,
        n=n,
    )
