"""Compiled vs numpy k-parallel kernel: timing and agreement.

    python benchmarks/bench_kernels.py [--repeat N]

Both backends are imported directly, so the environment switch that picks
the default backend does not matter here.
"""
import argparse
import math
import time

import numpy as np

from rotfric.greens import _pykernels, _prop_breaks, _evan_breaks

try:
    from rotfric.greens import _ckernels
except ImportError:  # extension not built
    _ckernels = None

# (label, k0, z, eps, conductor)
CASES = [
    ("mirror, k0 z = 1", 1.0, 1.0, 1.0, True),
    ("mirror, k0 z = 100", 1.0, 100.0, 1.0, True),
    ("gold-like, near field", 1.0, 0.01, 1 + 1e6j, False),
    ("gold-like, k0 z = 3", 1.0, 3.0, 1 + 1e6j, False),
    ("dielectric, eps = 4 + 0.1i", 2.0, 0.3, 4 + 0.1j, False),
    ("plasmonic, eps = -5 + 0.3i", 1.0, 0.05, -5 + 0.3j, False),
]


def call(mod, k0, z, eps, conductor, rtol=1e-8):
    vac = k0 / (6 * math.pi)
    fine = k0 if conductor else k0 / math.sqrt(max(abs(eps), 1.0))
    pb = _prop_breaks(k0, z, fine)
    eb = np.array([0.0]) if conductor else _evan_breaks(k0, z, max(20 / z, 10 * k0), fine)
    return mod.adaptive_reflected(k0, z, eps, conductor, pb, eb, vac, vac, rtol, 0.0, 20000)


def best_time(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled kernel not built; only the numpy backend is available")
    print(f"{'case':<28} {'panels':>7} {'numpy ms':>10} {'cython ms':>10} {'speedup':>8} {'max rel diff':>13}")
    for label, k0, z, eps, cond in CASES:
        py = call(_pykernels, k0, z, eps, cond)
        tp = best_time(lambda: call(_pykernels, k0, z, eps, cond), args.repeat)
        if _ckernels is None:
            print(f"{label:<28} {py[4]:>7d} {1e3 * tp:>10.3f}")
            continue
        cy = call(_ckernels, k0, z, eps, cond)
        tc = best_time(lambda: call(_ckernels, k0, z, eps, cond), args.repeat)
        vac = k0 / (6 * math.pi)
        diff = max(abs(cy[0] - py[0]), abs(cy[1] - py[1])) / vac
        print(f"{label:<28} {py[4]:>7d} {1e3 * tp:>10.3f} {1e3 * tc:>10.3f} "
              f"{tp / tc:>8.1f} {diff:>13.2e}")


if __name__ == "__main__":
    main()
