"""Time the compiled kernels against the numpy fallback on identical inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each kernel is run on both backends, the outputs are checked to be equal,
and the best-of-``repeat`` wall time and the speed-up are printed.
"""
import argparse
import time

import numpy as np

from restrictlab import _pykernels

try:
    from restrictlab import _ckernels
except ImportError:
    _ckernels = None


def _best(fn, args, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(rng):
    walk = np.cumsum(rng.standard_normal(2 ** 17))
    x17 = np.linspace(0.0, 1.0, walk.size)
    conv_x = np.linspace(0.0, 1.0, 1025)
    conv_y = np.sin(9.0 * conv_x) + 1e-3 * rng.standard_normal(conv_x.size)
    holder = np.cumsum(rng.standard_normal(4097)) / 64.0
    return [
        ("lower_hull n=2^17", "lower_hull", (x17, walk)),
        ("lis_indices n=2^17", "lis_indices", (walk, False)),
        ("lis_length n=1024", "lis_length", (rng.standard_normal(1024), False)),
        ("convex_chain m=1025", "convex_chain", (conv_x, conv_y, 0.0, False)),
        ("holder_sup_uniform n=4097", "holder_sup_uniform", (holder, 1.0 / 4096, 0.5)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; only the fallback is available")
    rng = np.random.default_rng(a.seed)
    print(f"{'kernel':28s} {'python [s]':>11s} {'cython [s]':>11s} {'speed-up':>9s}  same")
    for label, name, args in cases(rng):
        tp, op = _best(getattr(_pykernels, name), args, a.repeat)
        if _ckernels is None:
            print(f"{label:28s} {tp:11.4f} {'-':>11s} {'-':>9s}  -")
            continue
        tc, oc = _best(getattr(_ckernels, name), args, a.repeat)
        same = np.array_equal(np.asarray(op), np.asarray(oc))
        print(f"{label:28s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f}x  {same}")


if __name__ == "__main__":
    main()
