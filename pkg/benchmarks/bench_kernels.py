"""Compiled kernels against the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--rows 256] [--cols 256]

Prints one line per kernel and backend with the best wall time, the
speed-up over numpy and the largest deviation between the two outputs.
The end-to-end line times ``wigner_A_grid`` of the tau-Wigner projection
through the generator chain with Lagrange resampling, the main caller of
the compiled resampler. ``ndft_rows`` is dispatched to numpy by default,
so its compiled line is informational.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from mtfa import kernels


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_kernel(name, call, repeat):
    ref = call("numpy")
    t_np = best(lambda: call("numpy"), repeat)
    print(f"{name:<28} numpy   {t_np * 1e3:9.2f} ms")
    try:
        kernels.get_impl("cython")
    except RuntimeError:
        print(f"{name:<28} cython  (not built)")
        return
    out = call("cython")
    t_cy = best(lambda: call("cython"), repeat)
    dev = float(np.max(np.abs(out - ref)))
    print(f"{name:<28} cython  {t_cy * 1e3:9.2f} ms   x{t_np / t_cy:6.1f}   max deviation {dev:.1e}")


def end_to_end(repeat):
    code = (
        "import timeit, numpy as np, mtfa;"
        "from mtfa.distributions import wigner_A_grid;"
        "from mtfa.metaplectic import SampledSignal;"
        "from mtfa.symplectic import make_named;"
        "A = make_named('tau', tau=0.3);"
        "g = SampledSignal.from_function(lambda t: np.exp(-np.pi * t**2), 256, 1/16);"
        "run = lambda: wigner_A_grid(A, g, g, method='general', resample='lagrange');"
        f"t = min(timeit.repeat(run, number=1, repeat={repeat}));"
        "print(mtfa.BACKEND, t)"
    )
    times = {}
    for pure in ("1", ""):
        env = {**os.environ, "MTFA_PURE_PYTHON": pure}
        if not pure:
            env.pop("MTFA_PURE_PYTHON")
        out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True)
        backend, t = out.stdout.split()
        times[backend] = float(t)
    for backend, t in times.items():
        extra = f"   x{times['numpy'] / t:6.1f}" if backend != "numpy" else ""
        print(f"{'tau-Wigner grid, Lagrange':<28} {backend:<7} {t * 1e3:9.2f} ms{extra}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--rows", type=int, default=256)
    ap.add_argument("--cols", type=int, default=256)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    R, N = args.rows, args.cols
    data = rng.normal(size=(R, N)) + 1j * rng.normal(size=(R, N))
    pos = rng.uniform(0, N - 1, size=(R, N))
    x = (np.arange(N) - N // 2) / 16
    freqs = rng.uniform(-8, 8, size=N)

    print(f"threads: {kernels.threads()}   rows x cols: {R} x {N}   default backend: {kernels.BACKEND}")
    for order in (4, 8):
        bench_kernel(f"lagrange_resample_rows o={order}",
                     lambda b, order=order: kernels.lagrange_resample_rows(data, pos, order, backend=b), args.repeat)
    bench_kernel("ndft_rows", lambda b: kernels.ndft_rows(data, x, freqs, backend=b), args.repeat)
    end_to_end(args.repeat)


if __name__ == "__main__":
    main()
