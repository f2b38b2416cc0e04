"""Compare the compiled and pure-Python sup |Psi_z| kernels.

Usage: python3 benchmarks/bench_psi.py [--points N] [--seed S]
"""
import argparse
import time

import numpy as np

from pentablock import _psi_fallback
from pentablock.geometry import sample_pentablock

try:
    from pentablock import _psi_kernel
except ImportError:
    _psi_kernel = None


def _time(fn, a, s, p, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(a, s, p)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    pts = sample_pentablock(args.points, args.seed)
    a = np.array([q.a for q in pts])
    s = np.array([q.s for q in pts])
    p = np.array([q.p for q in pts])

    t_py, v_py = _time(_psi_fallback.psi_sup_batch, a, s, p, 1)
    print(f"python : {1e3 * t_py / args.points:8.3f} ms/point")
    if _psi_kernel is None:
        print("cython : extension not built")
        return 0
    t_cy, v_cy = _time(_psi_kernel.psi_sup_batch, a, s, p, args.repeat)
    print(f"cython : {1e3 * t_cy / args.points:8.3f} ms/point")
    print(f"speedup: {t_py / t_cy:8.1f}x")
    print(f"max |difference| between backends: {np.max(np.abs(v_py - v_cy)):.3e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
