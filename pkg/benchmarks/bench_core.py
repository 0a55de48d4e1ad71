#!/usr/bin/env python3
"""Benchmark the compiled quadrature core against the numpy fallback on
representative commutator workloads.

Usage: python benchmarks/bench_core.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from bmolab._core import _pycore

try:
    from bmolab._core import _quadcore
except ImportError:
    _quadcore = None


def workload(n_dim, res, m):
    rng = np.random.default_rng(2020)
    xs = rng.uniform(-3, 3, (m, n_dim))
    axis = np.linspace(-1, 1, res)
    if n_dim == 1:
        ynodes = axis.reshape(-1, 1)
    else:
        g = np.meshgrid(*([axis] * n_dim), indexing="ij")
        ynodes = np.stack([a.ravel() for a in g], axis=1)
    fvals = np.exp(-np.sum(ynodes ** 2, axis=1))
    b_at_y = 0.5 * np.log1p(np.sum(ynodes ** 2, axis=1))
    bxs = 0.5 * np.log1p(np.sum(xs ** 2, axis=1))
    return dict(
        xs=xs, bxs=bxs, ynodes=ynodes, fvals=fvals, b_at_y=b_at_y,
        znodes=ynodes, gvals=fvals, b_at_z=b_at_y,
        cell_weight=(2.0 / res) ** (2 * n_dim),
        shape_kind=0, n_dim=n_dim, eta=0.25, trunc_mode=1,
        phi_mode=0, A=0.0, b_mode=1, absolute=False, xy_factor=False,
    )


def best_of(fn, args, repeat):
    times = []
    fn(**args)  # warmup
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(**args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    opts = ap.parse_args()

    cases = [
        ("n=1, res=96, 81 points", workload(1, 96, 81)),
        ("n=1, res=256, 21 points", workload(1, 256, 21)),
        ("n=2, res=24, 25 points", workload(2, 24, 25)),
    ]
    print(f"{'case':<28} {'numpy (s)':>12} {'cython (s)':>12} {'speedup':>9}")
    for label, args in cases:
        t_py = best_of(_pycore.bilinear_sum, args, opts.repeat)
        if _quadcore is None:
            print(f"{label:<28} {t_py:>12.4f} {'(not built)':>12} {'-':>9}")
            continue
        a = _pycore.bilinear_sum(**args)
        b = _quadcore.bilinear_sum(**args)
        rel = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
        assert rel < 1e-12, f"backend mismatch {rel}"
        t_cy = best_of(_quadcore.bilinear_sum, args, opts.repeat)
        print(f"{label:<28} {t_py:>12.4f} {t_cy:>12.4f} {t_py / t_cy:>8.1f}x")


if __name__ == "__main__":
    main()
