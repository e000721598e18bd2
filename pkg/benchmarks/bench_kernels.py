#!/usr/bin/env python3
"""Time the numba kernels against the numpy fallbacks on identical inputs.

    python benchmarks/bench_kernels.py              # kernel micro-benchmarks
    python benchmarks/bench_kernels.py --end-to-end # also a full oracle run per backend

The end-to-end mode runs a child process with HYPERELL_DISABLE_NUMBA=1 for the
numpy side, so the whole pipeline (not just one kernel) is compared.
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from hyperell import kernels
from hyperell._accel import HAVE_NUMBA
from hyperell.field import extension, gf_q


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def _as_tuple(x):
    return x if isinstance(x, tuple) else (x,)


def bench_field(q, rows, degree, repeat, rng):
    F = gf_q(q)
    tab = F.tables()
    coeffs = rng.integers(0, q, size=(rows, degree + 1), dtype=np.int32)
    pts = np.arange(q, dtype=np.int32)
    other = rng.integers(0, q, size=(rows, 3), dtype=np.int32)
    cases = {
        "horner": lambda b: kernels.horner(coeffs, pts, tab, backend=b),
        "poly_mul_rows": lambda b: kernels.poly_mul_rows(coeffs, other, tab, backend=b),
    }
    if F.p == 2:
        big, _ = extension(F, 1)
        hrow = rng.integers(0, q, size=q, dtype=np.int32)
        fv = rng.integers(0, q, size=(rows, q), dtype=np.int32)
        cases["tau_stats"] = lambda b: kernels.tau_stats(hrow, fv, big.log, big.exp, big.trace, big.qm1, backend=b)
    out = []
    for name, fn in cases.items():
        ref = fn("numpy")
        t_np = best_of(lambda: fn("numpy"), repeat)
        if HAVE_NUMBA:
            got = fn("numba")  # also compiles
            same = all(np.array_equal(x, y) for x, y in zip(_as_tuple(got), _as_tuple(ref)))
            t_nb = best_of(lambda: fn("numba"), repeat)
        else:
            same, t_nb = None, float("nan")
        out.append((q, name, rows, t_np, t_nb, same))
    return out


END_TO_END = (
    "import time;from hyperell.curves import stat_histogram;from hyperell.field import gf_q;"
    "stat_histogram(gf_q({wq}),1,4,'{par}');"  # warm-up: loads or compiles the kernels
    "t=time.perf_counter();stat_histogram(gf_q({q}),{g},4,'{par}');print(time.perf_counter()-t)"
)


def end_to_end(q, g, parity):
    times = {}
    for label, disable in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, HYPERELL_DISABLE_NUMBA=disable)
        code = END_TO_END.format(q=q, g=g, par=parity, wq=2 if parity == "even" else 3)
        res = subprocess.run([sys.executable, "-c", code], env=env, check=True, capture_output=True, text=True)
        times[label] = float(res.stdout.strip().splitlines()[-1])
    return times


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--rows", type=int, default=20000)
    ap.add_argument("--degree", type=int, default=6)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--fields", default="3,4,9,16,25")
    ap.add_argument("--end-to-end", action="store_true")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print(f"numba available: {HAVE_NUMBA}")
    print(f"{'q':>4} {'kernel':<14} {'rows':>7} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}  same")
    for q in (int(x) for x in args.fields.split(",")):
        for q_, name, rows, t_np, t_nb, same in bench_field(q, args.rows, args.degree, args.repeat, rng):
            speed = t_np / t_nb if t_nb == t_nb and t_nb > 0 else float("nan")
            print(f"{q_:>4} {name:<14} {rows:>7} {t_np * 1e3:>10.2f} {t_nb * 1e3:>10.2f} {speed:>8.1f}  {same}")
    if args.end_to_end:
        for q, g, par in ((5, 2, "odd"), (3, 3, "odd"), (4, 2, "even")):
            t = end_to_end(q, g, par)
            print(f"oracle histogram q={q} g={g} {par}: numba {t['numba']:.2f}s  numpy {t['numpy']:.2f}s")


if __name__ == "__main__":
    main()
