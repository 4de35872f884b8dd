import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmi.samples import (
    GaussianSpec,
    PairedSampleSet,
    ShuffleMode,
    SplitShuffleConfig,
    generate_gaussian,
    load_csv,
    split_and_shuffle,
    split_indices,
    split_sizes,
)


def test_load_csv_three_rows(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("0,0\n1,1\n2,2")
    data = load_csv(f, 1, 1)
    assert data.n == 3
    np.testing.assert_array_equal(data.points, [[0, 0], [1, 1], [2, 2]])


def test_load_csv_with_header(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("x,y\n0,1\n2,3\n")
    np.testing.assert_array_equal(load_csv(f, 1, 1).points, [[0, 1], [2, 3]])


def test_load_csv_empty_file(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("")
    with pytest.raises(ValueError, match="no data"):
        load_csv(f, 1, 1)


@pytest.mark.parametrize("bad", ["NaN", "inf", "-Infinity"])
def test_load_csv_rejects_non_finite(tmp_path, bad):
    f = tmp_path / "d.csv"
    f.write_text(f"0,0\n1,{bad}\n")
    with pytest.raises(ValueError, match=r":2: column 2"):
        load_csv(f, 1, 1)


def test_load_csv_parse_error_is_located(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("0,0\n1,1\n2,abc\n")
    with pytest.raises(ValueError, match=r":3: column 2"):
        load_csv(f, 1, 1)


def test_load_csv_wrong_width(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("0,0,0\n1,1,1\n")
    with pytest.raises(ValueError, match="dx \\+ dy"):
        load_csv(f, 1, 1)


def test_load_csv_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_csv(tmp_path / "nope.csv", 1, 1)


def test_paired_sample_set_invariants():
    with pytest.raises(ValueError):
        PairedSampleSet(np.zeros((1, 2)), 1, 1)
    with pytest.raises(ValueError):
        PairedSampleSet(np.zeros((3, 2)), 0, 2)
    with pytest.raises(ValueError):
        PairedSampleSet(np.array([[0.0, np.nan], [1, 1]]), 1, 1)
    s = PairedSampleSet(np.arange(6.0).reshape(3, 2), 1, 1)
    assert not s.points.flags.writeable
    np.testing.assert_array_equal(s.x[:, 0], [0, 2, 4])
    np.testing.assert_array_equal(s.y[:, 0], [1, 3, 5])


def test_gaussian_independent_correlation():
    data = generate_gaussian(GaussianSpec(d=2, n=100_000, seed=3))
    r = np.corrcoef(data.points.T)[0, 1]
    assert abs(r) < 0.02


def test_gaussian_correlated():
    data = generate_gaussian(GaussianSpec(d=2, n=100_000, rho=0.9, seed=3))
    r = np.corrcoef(data.points.T)[0, 1]
    assert abs(r - 0.9) < 0.02


def test_gaussian_deterministic():
    a = generate_gaussian(GaussianSpec(d=4, n=50, seed=9))
    b = generate_gaussian(GaussianSpec(d=4, n=50, seed=9))
    c = generate_gaussian(GaussianSpec(d=4, n=50, seed=10))
    np.testing.assert_array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)


@pytest.mark.parametrize("rho", [1.0, -1.0, 1.5])
def test_gaussian_rejects_non_pd(rho):
    with pytest.raises(ValueError):
        GaussianSpec(d=2, n=10, rho=rho)


def test_gaussian_default_split():
    spec = GaussianSpec(d=10, n=5)
    assert spec.dx == 5
    assert generate_gaussian(spec).dy == 5


def test_split_sizes_exact_fraction():
    assert split_sizes(1000, 0.3) == (300, 700)


def test_split_sizes_half_up():
    # 2.5 rounds up
    assert split_sizes(5, 0.5) == (3, 2)


@pytest.mark.parametrize("n,alpha", [(4, 0.2), (4, 0.9), (3, 0.5)])
def test_split_sizes_degenerate(n, alpha):
    with pytest.raises(ValueError, match="degenerate"):
        split_sizes(n, alpha)


def test_config_validation():
    with pytest.raises(ValueError):
        SplitShuffleConfig(0.0)
    with pytest.raises(ValueError):
        SplitShuffleConfig(0.5, seed=-1)
    assert SplitShuffleConfig(0.5, shuffle_mode="indep").shuffle_mode is ShuffleMode.INDEPENDENT_DRAW


def test_permutation_preserves_y_multiset_small():
    pts = np.array([[0, 10], [1, 11], [2, 12], [3, 13]], float)
    data = PairedSampleSet(pts, 1, 1)
    cfg = SplitShuffleConfig(0.5, seed=4)
    first, shuffled = split_and_shuffle(data, cfg)
    _, second_idx = split_indices(4, cfg)
    assert sorted(shuffled.y[:, 0]) == sorted(pts[second_idx, 1])
    np.testing.assert_array_equal(shuffled.x[:, 0], pts[second_idx, 0])


@settings(max_examples=60, deadline=None)
@given(n=st.integers(4, 60), alpha=st.floats(0.05, 0.95), seed=st.integers(0, 2**32))
def test_split_is_partition_and_permutation_keeps_blocks(n, alpha, seed):
    n1 = int(np.floor(alpha * n + 0.5))
    if n1 < 2 or n - n1 < 2:
        return
    pts = np.column_stack([np.arange(n), 1000 + np.arange(n), 2000 + np.arange(n)]).astype(float)
    data = PairedSampleSet(pts, 1, 2)
    cfg = SplitShuffleConfig(alpha, seed)
    first, shuffled = split_and_shuffle(data, cfg)
    a, b = split_indices(n, cfg)
    assert sorted(np.concatenate([a, b]).tolist()) == list(range(n))
    assert first.n == n1 and shuffled.n == n - n1
    np.testing.assert_array_equal(first.points, pts[a])
    # x-blocks unchanged in order, y-blocks permuted as whole blocks
    np.testing.assert_array_equal(shuffled.x, pts[b, :1])
    assert sorted(map(tuple, shuffled.y)) == sorted(map(tuple, pts[b, 1:]))
    np.testing.assert_array_equal(shuffled.y[:, 1] - shuffled.y[:, 0], 1000)
    f2, s2 = split_and_shuffle(data, cfg)
    np.testing.assert_array_equal(s2.points, shuffled.points)


def test_independent_draw_pair_frequencies():
    pts = np.array([[0, 0], [1, 1], [2, 2], [3, 3], [4, 4]], float)
    data = PairedSampleSet(pts, 1, 1)
    counts = np.zeros((5, 5))
    seeds = 100_000
    for seed in range(seeds):
        cfg = SplitShuffleConfig(0.6, seed, ShuffleMode.INDEPENDENT_DRAW)  # n'' = 2
        _, sh = split_and_shuffle(data, cfg)
        _, b = split_indices(5, cfg)
        row = sh.points[0]
        # express as (x slot, y slot) within the held-out pair
        xi = int(np.flatnonzero(pts[b, 0] == row[0])[0])
        yi = int(np.flatnonzero(pts[b, 1] == row[1])[0])
        counts[xi, yi] += 1
    freq = counts[:2, :2] / seeds
    np.testing.assert_allclose(freq, 0.25, atol=0.01)
