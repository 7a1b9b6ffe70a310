"""Compare the compiled and numpy kernels on representative workloads.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from hardylab import _pykernels

try:
    from hardylab import _ckernels
except ImportError:
    _ckernels = None


def workloads(rng):
    S, K = 12, 3
    breaks = np.concatenate([[0.0], np.sort(10 ** rng.uniform(-3, 3, S - 1)), [np.inf]])
    c = rng.uniform(-2, 2, (S, K))
    e = rng.uniform(-3, 3, (S, K))
    k = rng.integers(0, 2, (S, K)).astype(np.int64)
    x = 10 ** rng.uniform(-4, 4, 20000)
    edges = np.geomspace(1e-4, 1e4, 8 * 64 + 1)
    seg = np.searchsorted(breaks, edges[:-1], side="right") - 1
    nodes, weights = np.polynomial.legendre.leggauss(16)
    return {
        "eval_piecewise (20k points)": lambda m: m.eval_piecewise(x, breaks, c, e, k),
        "abs_power_cells (512 cells x 16)": lambda m: m.abs_power_cells(
            edges[:-1], edges[1:], seg, nodes, weights, c, e, k, 1.7, 0.5
        ),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    work = workloads(np.random.default_rng(0))
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'workload':36s} " + " ".join(f"{n:>12s}" for n, _ in backends) + "     speedup")
    for name, fn in work.items():
        times = []
        for _, mod in backends:
            fn(mod)
            times.append(min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)))
        ref = fn(backends[0][1])
        for _, mod in backends[1:]:
            np.testing.assert_allclose(fn(mod), ref, rtol=1e-10)
        row = " ".join(f"{t * 1e3:10.3f}ms" for t in times)
        speed = f"{times[0] / times[1]:8.1f}x" if len(times) > 1 else "     n/a"
        print(f"{name:36s} {row} {speed}")


if __name__ == "__main__":
    main()
