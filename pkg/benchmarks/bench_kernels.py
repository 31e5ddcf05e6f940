#!/usr/bin/env python3
"""Time the numeric kernels compiled and as plain Python.

Kernels call each other, so ``py_func`` on the outer kernel would still run
compiled helpers.  The Python column therefore comes from a child process
started with ``RANKEDTREES_NO_JIT=1``; both processes print their outputs'
checksums, which are compared before the table is shown.

    python benchmarks/bench_kernels.py --n 2000 --rows 10
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def best_of(fn, make, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        args = make()  # fresh buffers: fdr_fill writes into its arguments
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def checksum(out):
    if isinstance(out, tuple):
        return [checksum(x) for x in out]
    a = np.asarray(out)
    return [int(a.sum()), int((a * np.arange(1, a.size + 1).reshape(a.shape)).sum())]


def run(n, rows, repeat, seed):
    from rankedtrees import USE_NUMBA, kernels
    from rankedtrees.rng import RngHandle

    draws = RngHandle(seed).strong_draws(n, rows)
    one = np.ascontiguousarray(draws[0])
    words = np.random.PCG64(seed).random_raw(n * rows // 4 + 64).astype(np.uint64)
    bounds = np.arange(3, n + 1, dtype=np.int64)

    def fdr_args():
        out = np.empty((rows, bounds.shape[0]), dtype=np.int64)
        return (words, 0, words.shape[0] * 64, bounds, out, np.array([0, 0, 1, 0], np.int64))

    def fdr(*a):
        kernels.fdr_fill(*a)
        return a[4]

    cases = [
        ("build_strong", kernels.build_strong, lambda: (one, n)),
        ("strong_params", kernels.strong_params, lambda: (draws, n)),
        ("strong_params_scan", kernels.strong_params_scan, lambda: (draws, n)),
        ("fdr_fill", fdr, fdr_args),
    ]
    result = {"jit": USE_NUMBA, "rows": {}}
    for name, fn, make in cases:
        fn(*make())  # warm up / compile
        t, out = best_of(fn, make, repeat)
        result["rows"][name] = {"seconds": t, "checksum": checksum(out)}
    return result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000, help="tree size")
    ap.add_argument("--rows", type=int, default=10, help="draw sequences per batch kernel")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)

    if args.child:
        print(json.dumps(run(args.n, args.rows, args.repeat, args.seed)))
        return

    flags = ["--n", str(args.n), "--rows", str(args.rows), "--seed", str(args.seed), "--child"]
    results = {}
    for mode, env_flag, repeat in (("jit", "0", args.repeat), ("python", "1", 1)):
        env = dict(os.environ, RANKEDTREES_NO_JIT=env_flag)
        proc = subprocess.run([sys.executable, __file__, *flags, "--repeat", str(repeat)],
                              capture_output=True, text=True, env=env, check=True)
        results[mode] = json.loads(proc.stdout)
    if not results["jit"]["jit"]:
        print("numba unavailable: both columns time the Python path")

    print(f"n={args.n} rows={args.rows}")
    print(f"{'kernel':<20}{'jit [ms]':>12}{'python [ms]':>14}{'speedup':>10}")
    for name, jit_row in results["jit"]["rows"].items():
        py_row = results["python"]["rows"][name]
        if jit_row["checksum"] != py_row["checksum"]:
            raise SystemExit(f"{name}: compiled and Python outputs differ")
        jt, pt = jit_row["seconds"], py_row["seconds"]
        print(f"{name:<20}{jt * 1e3:>12.3f}{pt * 1e3:>14.1f}{pt / jt:>9.0f}x")


if __name__ == "__main__":
    main()
