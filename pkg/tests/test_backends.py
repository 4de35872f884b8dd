import os
import subprocess
import sys

import numpy as np
import pytest

from gmi import mst
from gmi.mst import _fallback

compiled_only = pytest.mark.skipif(mst.BACKEND != "compiled", reason="compiled extension not built")


@compiled_only
@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("algo", [mst.mst_quadratic, mst.mst_dualtree])
def test_compiled_matches_fallback(algo, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(int(rng.integers(2, 300)), int(rng.integers(1, 6))))
    if seed % 3 == 0:
        X = np.round(X)  # heavy ties
    a, b = algo(X, compiled=True), algo(X, compiled=False)
    np.testing.assert_array_equal(a.edges, b.edges)
    # squared distances are summed in a different order; only the last bits may differ
    np.testing.assert_allclose(a.weights, b.weights, rtol=1e-12, atol=0)


def test_fallback_functions_exist():
    assert callable(_fallback.prim) and callable(_fallback.boruvka)


def test_backend_flag_value():
    assert mst.BACKEND in ("compiled", "python")


def test_pure_python_env_selects_fallback():
    code = "from gmi import mst; print(mst.BACKEND)"
    env = dict(os.environ, GMI_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_requesting_compiled_without_extension(monkeypatch):
    monkeypatch.setattr(mst, "_core", None)
    with pytest.raises(RuntimeError, match="compiled"):
        mst.mst_quadratic(np.zeros((3, 2)), compiled=True)
