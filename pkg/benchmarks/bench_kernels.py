"""Compiled vs fallback timings.

Float kernels: Cython extension against the numpy fallback.
Exact LP: gmpy2.mpq against fractions.Fraction (each in a fresh interpreter,
since the backend is fixed at import).

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from rank1_landscape import _kernels_py, kernels

LP_SNIPPET = """
import random, timeit
from rank1_landscape.landscape import FuzzConfig, random_instance, random_point
from rank1_landscape.criticality import is_critical_lp, is_critical_directional
from rank1_landscape import rational_lp
rng = random.Random(0)
cfg = FuzzConfig()
cases = []
for _ in range(60):
    inst = random_instance(rng, cfg)
    cases.append((inst, random_point(rng, inst, cfg)))
def work():
    for inst, p in cases:
        is_critical_lp(inst, p)
        is_critical_directional(inst, p)
best = min(timeit.repeat(work, number=1, repeat={repeat}))
print(rational_lp.BACKEND, best)
"""


def bench_float(repeat):
    rng = np.random.default_rng(0)
    m, n = 4, 4
    x0, y0, M = rng.normal(size=m), rng.normal(size=n), rng.normal(size=(m, n))
    pts = np.ascontiguousarray(rng.normal(size=(100_000, m + n)))
    rows = []
    for name, call in [
        ("subgradient_path 20k iters", lambda k: k.subgradient_path(x0, y0, M, 0.1, True, 20_000)),
        ("grid_values 100k points", lambda k: k.grid_values(pts, m, M)),
        ("f_value x 10k", lambda k: [k.f_value(x0, y0, M) for _ in range(10_000)]),
    ]:
        fast = min(timeit.repeat(lambda: call(kernels.impl), number=1, repeat=repeat))
        slow = min(timeit.repeat(lambda: call(_kernels_py), number=1, repeat=repeat))
        rows.append((name, fast, slow))
    return rows


def bench_lp(repeat):
    out = {}
    for pure in (False, True):
        env = dict(os.environ)
        env.pop("RANK1_LANDSCAPE_PURE", None)
        if pure:
            env["RANK1_LANDSCAPE_PURE"] = "1"
        res = subprocess.run([sys.executable, "-c", LP_SNIPPET.format(repeat=repeat)],
                             env=env, capture_output=True, text=True, check=True)
        backend, secs = res.stdout.split()
        out[backend] = float(secs)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"compiled extension available: {kernels.COMPILED}")
    print(f"{'kernel':30s} {'compiled':>10s} {'numpy':>10s} {'speedup':>8s}")
    for name, fast, slow in bench_float(args.repeat):
        print(f"{name:30s} {fast:10.4f} {slow:10.4f} {slow / fast:8.1f}x")
    lp = bench_lp(args.repeat)
    print("\nexact LP, 60 random points, both LP deciders (seconds):")
    for backend, secs in lp.items():
        print(f"  {backend:10s} {secs:.3f}")
    if {"gmpy2", "fraction"} <= lp.keys():
        print(f"  speedup     {lp['fraction'] / lp['gmpy2']:.1f}x")


if __name__ == "__main__":
    main()
