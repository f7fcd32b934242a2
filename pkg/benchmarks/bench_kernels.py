"""Time the compiled and pure-Python kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5] [--csv out.csv]
"""
import argparse
import sys
import timeit

import numpy as np

from ltlab.kernels import backends
from ltlab.tables import emit_table


def cases(rng):
    n = 8192
    h = 40.0 / n
    x = -20 + h * np.arange(1, n)
    diag = 2 / h**2 - 4 / np.cosh(x) ** 2
    off2 = np.full(n - 2, 1 / h**4)
    shifts = np.linspace(-4, 0, 64)
    pts = rng.random((400, 2))
    cells = rng.integers(0, 16, size=400)
    return {
        "sturm_counts (n=8192, 64 shifts)": lambda k: k.sturm_counts(diag, off2, shifts),
        "bisect_eigenvalues (n=8192, 2 roots)": lambda k: k.bisect_eigenvalues(diag, off2, 0, 2, -5.0, 0.0),
        "pair_exclusion (400 points)": lambda k: k.pair_exclusion(pts, cells, 1.0, 0.5),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args(argv)
    impls = backends()
    if "cython" not in impls:
        print("compiled kernels not available; only the Python backend is timed", file=sys.stderr)
    rows = []
    for name, fn in cases(np.random.default_rng(0)).items():
        ref = None
        times = {}
        for label, mod in impls.items():
            out = fn(mod)
            if ref is None:
                ref = out
            else:
                # agreement first, then speed
                np.testing.assert_allclose(np.asarray(out, float), np.asarray(ref, float), rtol=1e-12, atol=1e-12)
            t = timeit.Timer(lambda: fn(mod))
            loops, _ = t.autorange()
            times[label] = min(t.repeat(args.repeat, loops)) / loops
        speedup = times["python"] / times["cython"] if "cython" in times else float("nan")
        rows.append({"kernel": name, "python_s": times["python"], "cython_s": times.get("cython"),
                     "speedup": speedup})
        cy = times.get("cython")
        print(f"{name:40s} python {times['python'] * 1e3:9.3f} ms   "
              f"cython {cy * 1e3 if cy else float('nan'):9.3f} ms   x{speedup:.1f}")
    if args.csv:
        emit_table(rows, ["kernel", "python_s", "cython_s", "speedup"], args.csv)
    return 0


if __name__ == "__main__":
    sys.exit(main())
