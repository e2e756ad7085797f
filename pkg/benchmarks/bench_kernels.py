"""Time lattice rep-matrix assembly on the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [--N 20] [--terms 12] [--repeat 5]
"""
import argparse
import time

import numpy as np

from ccrfolner import _kernels
from ccrfolner.lattice import LatticeModel, rep_matrix
from ccrfolner.symplectic import SymplecticSpace
from ccrfolner.weyl import WeylElement


def element(model, terms, rng):
    pts = rng.integers(-3, 4, size=(terms, model.n))
    return WeylElement(model.space, {model.vector(p): complex(*rng.normal(size=2)) for p in pts})


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", type=int, default=20)
    ap.add_argument("--terms", type=int, default=12)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    sp = SymplecticSpace(1)
    model = LatticeModel(sp, [sp.vec([1, 0]), sp.vec([0, 1])], args.N)
    A = element(model, args.terms, np.random.default_rng(0))
    print(f"box side {model.width}, k = {model.k}, terms = {len(A.terms)}")

    results = {}
    for name in ("numba", "numpy"):
        if name == "numba" and not _kernels.HAVE_NUMBA:
            print("numba: not installed")
            continue
        _kernels.set_backend(name)
        results[name] = rep_matrix(model, A).matrix  # warm-up / JIT compile
        t = best_of(lambda: rep_matrix(model, A), args.repeat)
        print(f"{name:6s} {t * 1e3:9.2f} ms")
    if len(results) == 2:
        print(f"max |numba - numpy| = {np.abs(results['numba'] - results['numpy']).max():.2e}")


if __name__ == "__main__":
    main()
