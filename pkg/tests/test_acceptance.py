"""Acceptance criteria.  Each test records a one-line detail string; the
terminal summary prints ``PASS``/``FAIL`` per criterion (see conftest)."""
import time

import numpy as np
import pytest
from oracles import crossings, kruskal

from gmi.alpha import (
    AlphaCase,
    DensityBounds,
    RateConstants,
    alpha_bounds,
    grid_minimizer,
    objective,
    select_alpha,
    truncated_gaussian_bounds,
    xi,
)
from gmi.baselines import TruthOracle, kde_gmi, mc_true_gmi
from gmi.bench import SweepPlan, loglog_slope, run_sweep, runtime_compare
from gmi.divergence import PROPERTIES, gaussian_grid_gmi, property_sweep
from gmi.fr import estimate_gmi, fr_statistic
from gmi.mst import euclidean_mst, mst_dualtree, mst_quadratic
from gmi.samples import GaussianSpec, SplitShuffleConfig, generate_gaussian

pytestmark = pytest.mark.acceptance

SEED = 0


def test_c01_mst_oracle_equivalence(record_property):
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    worst = 0.0
    edge_mismatch = 0
    for _ in range(500):
        n = int(rng.integers(2, 129))
        dim = int(rng.integers(1, 9))
        X = rng.normal(size=(n, dim))
        ref_edges, ref_total = kruskal(X)
        for algo in (mst_quadratic, mst_dualtree):
            t = algo(X)
            worst = max(worst, abs(t.total_weight - ref_total) / ref_total)
            edge_mismatch += sorted(map(tuple, t.edges.tolist())) != ref_edges
    elapsed = time.perf_counter() - t0
    record_property("detail", f"max rel weight err {worst:.2e}, edge mismatches {edge_mismatch}, {elapsed:.1f}s")
    assert worst <= 1e-9
    assert edge_mismatch == 0
    assert elapsed < 60


def test_c02_fr_oracle_equivalence(record_property):
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(200):
        n = int(rng.integers(4, 129))
        X = rng.normal(size=(n, int(rng.integers(1, 7))))
        lab = np.r_[[1, 2], rng.integers(1, 3, size=n - 2)]
        edges, _ = kruskal(X)
        bad += fr_statistic(euclidean_mst(X), lab).r != crossings(edges, lab)
    elapsed = time.perf_counter() - t0
    record_property("detail", f"mismatches {bad}/200, {elapsed:.1f}s")
    assert bad == 0
    assert elapsed < 10


def _cell(plan, **kw):
    (rec,) = run_sweep(plan).select(**kw) if kw else run_sweep(plan).records
    return rec


def test_c03_independence_calibration(record_property):
    t0 = time.perf_counter()
    plan = SweepPlan(n=(2000,), d=(10,), alpha=(0.5,), trials=100, seed=SEED)
    rec = _cell(plan)
    elapsed = time.perf_counter() - t0
    record_property(
        "detail",
        f"mean {rec.mean:+.5f} (|.|<=0.02), MSE {rec.mse:.4e} +/- {rec.stderr:.1e} "
        f"(<= 5.418e-4), {elapsed:.0f}s",
    )
    assert abs(rec.mean) <= 0.02
    assert rec.mse <= 10 * 0.5418e-4
    assert elapsed < 300


def test_c04_alpha_half_has_lowest_mse(record_property):
    plan = SweepPlan(n=(1000, 1500, 2000), d=(6, 8, 10), alpha=(0.2, 0.5, 0.8), trials=100, seed=SEED)
    t0 = time.perf_counter()
    res = run_sweep(plan)
    parts, ok = [], True
    for d, n in ((6, 1000), (8, 1500), (10, 2000)):
        mse = {a: res.select(d=d, n=n, alpha=a)[0].mse for a in (0.2, 0.5, 0.8)}
        good = mse[0.5] < mse[0.2] and mse[0.5] < mse[0.8]
        ok &= good
        parts.append(f"d{d}: " + "/".join(f"{mse[a]:.2e}" for a in (0.2, 0.5, 0.8)))
    elapsed = time.perf_counter() - t0
    record_property("detail", "; ".join(parts) + f" (alpha .2/.5/.8), {elapsed:.0f}s")
    assert ok
    assert elapsed < 900


def test_c05_convergence_shape(record_property):
    ns = tuple(range(100, 1501, 100))
    plan = SweepPlan(n=ns, d=(6, 10, 12), alpha=(0.3,), trials=100, seed=SEED)
    res = run_sweep(plan)
    slopes = {d: loglog_slope(ns, [res.select(d=d, n=n)[0].mse for n in ns]) for d in (6, 10, 12)}
    end = {d: res.select(d=d, n=1500)[0].mse for d in (6, 10, 12)}
    record_property(
        "detail",
        "slopes " + ", ".join(f"d{d} {s:.3f}" for d, s in slopes.items())
        + "; MSE@1500 " + ", ".join(f"d{d} {m:.2e}" for d, m in end.items()),
    )
    assert -1 < slopes[6] < -0.05
    assert end[6] < end[10] < end[12]


def test_c06_fr_beats_kde_at_strong_dependence(record_property):
    rho, p, n = 0.9, 0.6, 2000
    truth, se = mc_true_gmi(TruthOracle(rho, p, 1_000_000, SEED))
    wins = 0
    t0 = time.perf_counter()
    for s in range(100):
        data = generate_gaussian(GaussianSpec(d=2, n=n, rho=rho, seed=s))
        fr = estimate_gmi(data, SplitShuffleConfig(p, s)).value
        kde = kde_gmi(data, p)
        wins += abs(fr - truth) < abs(kde - truth)
    elapsed = time.perf_counter() - t0
    record_property("detail", f"truth {truth:.4f} (se {se:.1e}); FR closer in {wins}/100 seeds, {elapsed:.0f}s")
    assert wins >= 60
    assert elapsed < 600


def test_c07_runtime_crossover(record_property):
    ladder = runtime_compare([2500, 5000, 10_000], d=2, seed=SEED, repeats=3, kde=False)
    (big,) = runtime_compare([10_000], d=2, seed=SEED, repeats=3)
    t = [r.fr_time for r in ladder]
    ratios = [t[1] / t[0], t[2] / t[1]]
    record_property(
        "detail",
        f"n=1e4 FR {big.fr_time:.3f}s vs KDE {big.kde_time:.3f}s; FR doubling ratios "
        + ", ".join(f"{r:.2f}" for r in ratios),
    )
    assert big.fr_time < big.kde_time
    assert all(r < 3 for r in ratios)


def test_c08_analytic_property_suite(record_property):
    t0 = time.perf_counter()
    rep = property_sweep(1000, seed=SEED, tol=1e-12)
    elapsed = time.perf_counter() - t0
    props = rep["properties"]
    bad = {k: v for k, v in props.items() if v["violations"]}
    record_property(
        "detail",
        f"{len(PROPERTIES) - len(bad)}/{len(PROPERTIES)} properties clean; "
        + ("violations: " + ", ".join(f"{k} {v['violations']}/{v['instances']} (worst {v['worst']:.2e})"
                                      for k, v in bad.items()) if bad else "no violations")
        + f"; {elapsed:.1f}s",
    )
    assert not bad
    assert elapsed < 60


def test_c09_quadrature_matches_monte_carlo(record_property):
    rhos = [round(0.1 * k, 1) for k in range(1, 10)]
    worst = 0.0
    truths = []
    for r in rhos:
        v, se = mc_true_gmi(TruthOracle(r, 0.5, 1_000_000, SEED))
        g = gaussian_grid_gmi(r, 0.5, grid=400)
        worst = max(worst, abs(v - g) / se)
        truths.append(v)
    increasing = all(a < b for a, b in zip(truths, truths[1:]))
    record_property("detail", f"max |grid - MC| = {worst:.2f} SE; increasing in rho: {increasing}")
    assert worst < 3
    assert increasing


def _fixtures():
    unif = DensityBounds(1, 1, 1, 1, 1, 1, 1.0, 2, 1.0, 1000)
    gauss = truncated_gaussian_bounds(0.5, 0.5, 500)
    return {
        "lower": (unif, RateConstants(), "ratio", AlphaCase.LOWER_BOUND),
        "interior": (unif, RateConstants(c_d=16), "ratio", AlphaCase.INTERIOR_ROOT),
        "upper": (gauss, RateConstants(), "ratio", AlphaCase.UPPER_BOUND),
    }


def test_c10_alpha_selector(record_property):
    worst_fd = 0.0
    worst_gap = 0.0
    case_ok = True
    for b, k, form, want in _fixtures().values():
        lo, hi = alpha_bounds(b)
        for a in np.linspace(lo, hi, 50):
            h = 1e-3 * a
            f = [objective(a + s * h, b, k, form) for s in (-2, -1, 1, 2)]
            fd = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
            x = xi(a, b, k, form)
            worst_fd = max(worst_fd, abs(x - fd) / abs(x))
        sol = select_alpha(b, k, form)
        case_ok &= sol.case is want
        worst_gap = max(worst_gap, abs(sol.alpha_tilde - grid_minimizer(b, k, form)))
    # the density-ratio kernel in the form whose end-point condition gives the
    # lower-bound outcome for truncated normals at rho in {0.5, 0.7}, n in {500, 1e4}
    normal_cases = []
    for rho in (0.5, 0.7):
        for n in (500, 10_000):
            b = truncated_gaussian_bounds(rho, 0.5, n)
            s_inv = select_alpha(b, form="inverse_ratio")
            s_rat = select_alpha(b, form="ratio")
            normal_cases.append((s_inv.case is AlphaCase.LOWER_BOUND and s_inv.xi_lo > 0, s_rat.case.value))
            worst_gap = max(worst_gap, abs(s_inv.alpha_tilde - grid_minimizer(b, form="inverse_ratio")))
    normal_ok = all(f[0] for f in normal_cases)
    record_property(
        "detail",
        f"max rel |Xi - FD| {worst_fd:.1e}; max |alpha~ - grid| {worst_gap:.1e}; three cases "
        f"{'ok' if case_ok else 'WRONG'}; normal-family lower-bound case {'ok' if normal_ok else 'WRONG'} "
        f"(ratio-form cases: {', '.join(sorted({f[1] for f in normal_cases}))})",
    )
    assert worst_fd < 1e-6
    assert worst_gap < 1e-4
    assert case_ok
    assert normal_ok
