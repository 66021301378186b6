"""Time the compiled shooting kernel against the NumPy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--steps 4096] [--batch 1 16 256] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from diracbound import kernels


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=4096)
    parser.add_argument("--batch", type=int, nargs="+", default=[1, 16, 256])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(0)
    x = np.linspace(0.01, 1.0, 2 * args.steps + 1)
    q, w = 0.5 / x, 1.0 / x
    h = x[2] - x[0]
    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    if len(backends) == 1:
        print("compiled kernels are not built; timing the fallback only")

    print(f"{'batch':>6} " + " ".join(f"{b:>12}" for b in backends) + "   speedup  max diff")
    for n in args.batch:
        lam = rng.uniform(-10, 10, n) + 1j * rng.uniform(-2, 2, n)
        times, outs = [], []
        for b in backends:
            run = lambda: kernels.rk4_shoot(q, w, h, lam, 1.0, 0.0, backend=b)
            outs.append(run())
            times.append(min(timeit.repeat(run, number=1, repeat=args.repeat)))
        line = f"{n:>6} " + " ".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            diff = np.max(abs(outs[0] - outs[1]) / np.maximum(abs(outs[0]), 1e-300))
            line += f"   {times[0] / times[1]:>7.1f}  {diff:.1e}"
        print(line)


if __name__ == "__main__":
    main()
