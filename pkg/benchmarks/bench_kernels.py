"""Compare the compiled and NumPy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from qwsearch import _pykernels

try:
    from qwsearch import _ckernels
except ImportError:
    _ckernels = None


def cases():
    r = np.random.default_rng(0)
    theta = r.normal(size=1024)
    coeff = r.normal(size=1024) / 32
    times = np.linspace(0.0, 2 * np.pi * 32, 2001)
    dt = times[1] - times[0]
    return [
        ("er_adjacency n=1024 p=0.1", lambda m: m.er_adjacency(1024, 0.1, 7)),
        ("er_adjacency n=2048 p=0.03", lambda m: m.er_adjacency(2048, 0.03, 7)),
        ("probability_curve_uniform n=1024 m=2001", lambda m: m.probability_curve_uniform(theta, coeff, 0.0, dt, 2001)),
        ("probability_curve n=1024 m=64", lambda m: m.probability_curve(theta, coeff, times[:64])),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'kernel':45s}" + "".join(f"{name:>12s}" for name, _ in backends) + "     speedup")
    for label, fn in cases():
        best = []
        for _, mod in backends:
            fn(mod)
            best.append(min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)))
        speed = f"{best[0] / best[1]:10.1f}x" if len(best) > 1 else ""
        print(f"{label:45s}" + "".join(f"{b * 1e3:10.2f}ms" for b in best) + speed)
    if _ckernels is None:
        print("compiled backend not built; only the NumPy fallback was timed")


if __name__ == "__main__":
    main()
