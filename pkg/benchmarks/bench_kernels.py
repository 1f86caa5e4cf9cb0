"""Time the numba kernels against the numpy fallback.

Each backend runs in its own interpreter because the choice is made at
import time from ``SIMPLEX_APPROX_DISABLE_JIT``. Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--points 20000]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from simplex_approx import _accel
from simplex_approx.jacobi1d import jacobi_P_table
from simplex_approx.tri_basis import WeightParams, basis_table

repeat, points = int(sys.argv[1]), int(sys.argv[2])
rng = np.random.default_rng(0)
u, v = rng.random(points), rng.random(points)
x, y = np.minimum(u, v), np.abs(u - v)
t = 2 * rng.random(points) - 1
w = WeightParams(0.5, -0.25, 1.0)
cases = {
    "jacobi_P_table n=40": lambda: jacobi_P_table(40, 0.5, -0.25, t),
    "basis_table n=10": lambda: basis_table(10, w, x, y),
    "basis_table n=30": lambda: basis_table(30, w, x, y),
}
out = {"backend": _accel.backend()}
for name, call in cases.items():
    call()  # compile or warm caches
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        call()
        best = min(best, time.perf_counter() - start)
    out[name] = best
print(json.dumps(out))
"""


def run_backend(disable_jit: bool, repeat: int, points: int) -> dict:
    env = dict(os.environ, SIMPLEX_APPROX_DISABLE_JIT="1" if disable_jit else "0")
    proc = subprocess.run([sys.executable, "-c", WORKER, str(repeat), str(points)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5, help="timed runs per case; the best is kept")
    parser.add_argument("--points", type=int, default=20000, help="evaluation points")
    args = parser.parse_args(argv)
    fast = run_backend(False, args.repeat, args.points)
    slow = run_backend(True, args.repeat, args.points)
    print(f"{'case':<22} {fast['backend']:>12} {slow['backend']:>12} {'speedup':>8}")
    for name in fast:
        if name == "backend":
            continue
        print(f"{name:<22} {fast[name]:>11.4f}s {slow[name]:>11.4f}s {slow[name] / fast[name]:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
