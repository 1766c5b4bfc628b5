#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Runs the ARMA residual recursion and the GRU forward/backward pass at
representative problem sizes and reports per-call times and speedups.

    python benchmarks/bench_kernels.py [--repeats N]

The compiled backend must be importable for the comparison; otherwise
only the fallback is timed.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from prevcast._kernels import _pykernels as pk

try:
    from prevcast._kernels import _ckernels as ck
except ImportError:
    ck = None


def time_call(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_css(repeats: int) -> list[tuple[str, float, float | None]]:
    rng = np.random.default_rng(0)
    rows = []
    for n, p, q in [(200, 1, 0), (200, 3, 3), (2000, 3, 3)]:
        w = rng.normal(size=n)
        phi = rng.normal(0, 0.2, size=p)
        theta = rng.normal(0, 0.2, size=q)
        args = (w, phi, theta, 0.1)
        t_py = time_call(pk.arma_css_residuals, *args, repeats=repeats)
        t_c = time_call(ck.arma_css_residuals, *args, repeats=repeats) if ck else None
        rows.append((f"css n={n} p={p} q={q}", t_py, t_c))
    return rows


def bench_gru(repeats: int) -> list[tuple[str, float, float | None]]:
    rng = np.random.default_rng(1)
    rows = []
    # (8, 7): the default minibatch; (1, 7): the recursive forecast path;
    # (49, 7): one full-batch epoch, where BLAS batching favors numpy.
    for b, t, k, h in [(8, 7, 3, 32), (1, 7, 3, 32), (8, 21, 3, 32), (49, 7, 3, 32)]:
        x = rng.normal(size=(b, t, k))
        weights = [
            rng.normal(size=(h, k)) * 0.2, rng.normal(size=(h, k)) * 0.2,
            rng.normal(size=(h, k)) * 0.2, rng.normal(size=(h, h)) * 0.2,
            rng.normal(size=(h, h)) * 0.2, rng.normal(size=(h, h)) * 0.2,
            np.zeros(h), np.zeros(h), np.zeros(h),
        ]
        fwd_args = (x, *weights)
        t_py = time_call(pk.gru_forward, *fwd_args, repeats=repeats)
        t_c = time_call(ck.gru_forward, *fwd_args, repeats=repeats) if ck else None
        rows.append((f"gru fwd B={b} T={t} k={k} h={h}", t_py, t_c))

        cache = pk.gru_forward(*fwd_args)
        dh = rng.normal(size=(b, t, h))
        bwd_args = (x, *cache, dh, *weights[:6])
        t_py = time_call(pk.gru_backward, *bwd_args, repeats=repeats)
        t_c = time_call(ck.gru_backward, *bwd_args, repeats=repeats) if ck else None
        rows.append((f"gru bwd B={b} T={t} k={k} h={h}", t_py, t_c))
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    if ck is None:
        print("compiled kernels not available; timing the numpy fallback only\n")
    rows = bench_css(args.repeats) + bench_gru(args.repeats)
    width = max(len(r[0]) for r in rows)
    header = f"{'case':<{width}}  {'python':>10}  {'cython':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, t_py, t_c in rows:
        if t_c is None:
            print(f"{name:<{width}}  {t_py * 1e6:>8.1f}us  {'-':>10}  {'-':>8}")
        else:
            print(
                f"{name:<{width}}  {t_py * 1e6:>8.1f}us  {t_c * 1e6:>8.1f}us  "
                f"{t_py / t_c:>7.1f}x"
            )


if __name__ == "__main__":
    main()
