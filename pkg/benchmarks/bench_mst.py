"""Compare the compiled MST kernels against the pure-Python fallback.

Usage::

    python benchmarks/bench_mst.py [--sizes 500,1000,2000] [--dims 2,4] [--repeats 3]

Prints one CSV row per (algorithm, n, d) with the median wall time of each
backend and the speedup.  Fallback runs of the dual-tree kernel are skipped
above ``--max-python-n`` because the interpreted tree search is slow.
"""
import argparse
import csv
import sys
import time

import numpy as np

from gmi import mst


def _median_time(fn, repeats):
    ts = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t0)
    return float(np.median(ts))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="500,1000,2000,4000")
    ap.add_argument("--dims", default="2,4")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--max-python-n", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if mst.BACKEND != "compiled":
        print("compiled extension not available; build it with `pip install -e .`", file=sys.stderr)
        return 1

    sizes = [int(s) for s in args.sizes.split(",")]
    dims = [int(s) for s in args.dims.split(",")]
    rng = np.random.default_rng(args.seed)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["algorithm", "n", "d", "compiled_s", "python_s", "speedup"])
    for name, algo in (("quadratic", mst.mst_quadratic), ("dualtree", mst.mst_dualtree)):
        for d in dims:
            for n in sizes:
                X = rng.normal(size=(n, d))
                tc = _median_time(lambda: algo(X, compiled=True), args.repeats)
                if name == "dualtree" and n > args.max_python_n:
                    w.writerow([name, n, d, f"{tc:.4f}", "", ""])
                    continue
                tp = _median_time(lambda: algo(X, compiled=False), args.repeats)
                w.writerow([name, n, d, f"{tc:.4f}", f"{tp:.4f}", f"{tp / tc:.1f}"])
                sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
