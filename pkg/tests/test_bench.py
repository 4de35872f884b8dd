import io
import math

import numpy as np
import pytest

from gmi.bench import (
    CSV_COLUMNS,
    Estimator,
    SweepPlan,
    loglog_slope,
    parse_plan,
    run_sweep,
    runtime_compare,
    theoretical_envelope,
    trial_seed,
)
from gmi.fr import estimate_gmi
from gmi.samples import GaussianSpec, SplitShuffleConfig, generate_gaussian


def test_single_trial_mse_is_square():
    plan = SweepPlan(n=(200,), d=(2,), trials=1, seed=5)
    rec = run_sweep(plan).records[0]
    assert rec.mse == rec.mean**2
    assert math.isnan(rec.stderr)
    seed = trial_seed(5, 0, 0)
    est = estimate_gmi(generate_gaussian(GaussianSpec(d=2, n=200, seed=seed)), SplitShuffleConfig(0.5, seed))
    assert rec.mean == est.value


def test_trial_seed_distinct():
    seeds = {trial_seed(0, c, t) for c in range(5) for t in range(20)}
    assert len(seeds) == 100
    assert trial_seed(1, 0, 0) != trial_seed(0, 0, 0)


def test_csv_reproducible_and_worker_independent():
    plan = SweepPlan(n=(100, 150), d=(2, 3), alpha=(0.3, 0.5), trials=3, seed=2)
    a = run_sweep(plan).to_csv(timing=False)
    b = run_sweep(plan, workers=2).to_csv(timing=False)
    assert a == b
    lines = a.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + 8


def test_csv_to_handle():
    res = run_sweep(SweepPlan(n=(50,), trials=2))
    fh = io.StringIO()
    assert res.to_csv(fh) is None
    assert fh.getvalue().startswith("estimator,")


def test_skipped_cells_are_recorded():
    plan = SweepPlan(n=(3, 100), d=(2, 4), rho=(0.0, 0.5), alpha=(0.5,), trials=2)
    res = run_sweep(plan)
    assert len(res.records) == 8
    tiny = res.select(n=3, d=2, rho=0.0)[0]
    assert "degenerate" in tiny.skipped and math.isnan(tiny.mse)
    assert res.select(n=100, d=4, rho=0.5)[0].skipped.startswith("a nonzero rho")
    assert res.select(n=100, d=2, rho=0.5)[0].skipped is None


def test_kde_sweep_uses_alpha_as_p():
    res = run_sweep(SweepPlan(estimator="kde", n=(60,), trials=2, alpha=(0.4,)))
    assert res.records[0].estimator == "kde"
    assert math.isfinite(res.records[0].mean)


def test_monte_carlo_truth_cell():
    plan = SweepPlan(n=(200,), rho=(0.5,), truth="mc", trials=2, mc_samples=10_000)
    rec = run_sweep(plan).records[0]
    assert rec.mse > 0 and rec.skipped is None


def test_plan_validation():
    with pytest.raises(ValueError):
        SweepPlan(trials=0)
    with pytest.raises(ValueError):
        SweepPlan(n=())
    with pytest.raises(ValueError):
        SweepPlan(estimator="knn")


def test_parse_plan_full():
    text = """
    # dimension sweep
    estimator = fr
    n = 100:500:200, 1000   # inclusive range
    d = 6, 10
    alpha = 0.2:0.8:0.3
    trials = 7
    seed = 3
    shuffle = indep
    """
    plan = parse_plan(text)
    assert plan.estimator is Estimator.FR
    assert plan.n == (100, 300, 500, 1000)
    assert plan.d == (6, 10)
    assert plan.alpha == (0.2, 0.5, 0.8)
    assert plan.trials == 7 and plan.seed == 3
    assert plan.shuffle.value == "indep"
    assert parse_plan(text, trials=2).trials == 2


@pytest.mark.parametrize(
    "text,msg",
    [
        ("n 100", "line 1: expected key = value"),
        ("x = 1", "unknown key"),
        ("n = 1\nn = 2", "line 2: duplicate key"),
        ("n = 1:5", "start:stop:step"),
        ("n = 5:1:0", "positive"),
        ("alpha = ,", "no values"),
        ("trials = many", "line 1"),
    ],
)
def test_parse_plan_errors(text, msg):
    with pytest.raises(ValueError, match=msg):
        parse_plan(text)


def test_loglog_slope():
    ns = np.array([100, 200, 400, 800])
    assert loglog_slope(ns, 3.0 / ns) == pytest.approx(-1.0)
    assert loglog_slope(ns, ns**-0.5) == pytest.approx(-0.5)


def test_envelope_example():
    (pt,) = theoretical_envelope([10_000], d=2, eta=1.0, alpha=0.5)
    assert pt.bias_terms[0] == pytest.approx(0.1)
    assert pt.bias_terms[1] == pytest.approx(5000**-0.5)
    assert pt.bias_terms[2] == pytest.approx(4 * 6 * 1e-4)
    assert pt.bias == pt.bias_terms[0]


def test_envelope_variance_halves_and_monotone():
    v0 = theoretical_envelope([1000], 3, 1.0, 0.0)[0].variance
    v5 = theoretical_envelope([1000], 3, 1.0, 0.5)[0].variance
    assert v5 == pytest.approx(v0 / 2)
    env = theoretical_envelope(range(100, 5000, 100), 4, 0.5, 0.3)
    assert all(a.bias >= b.bias and a.variance >= b.variance for a, b in zip(env, env[1:]))
    with pytest.raises(ValueError):
        theoretical_envelope([10], 2, 1.5, 0.5)
    with pytest.raises(ValueError):
        theoretical_envelope([10], 40, 1.0, 0.5)


def test_runtime_compare_structure():
    recs = runtime_compare([200, 400], repeats=1)
    assert [r.n for r in recs] == [200, 400]
    assert all(r.fr_time > 0 and r.kde_time > 0 for r in recs)
    assert runtime_compare([100], repeats=1, kde=False)[0].kde_time is None
    with pytest.raises(ValueError):
        runtime_compare([400, 200])
