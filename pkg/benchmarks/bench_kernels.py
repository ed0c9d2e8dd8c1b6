"""Time the compiled and pure-Python kernel backends on the same workloads.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from triaxis import kernels
from triaxis.majorana import find_roots, oat_normalized_polynomial
from triaxis.model import rotated_hamiltonian
from triaxis.semiclassical import integrate_rk4
from triaxis.spinalg import hermitian_eigen


def _eigen(dim):
    h = rotated_hamiltonian(dim - 1, 1.5, 1.0)
    return lambda: hermitian_eigen(h)


def _roots(N):
    p = oat_normalized_polynomial(N, 0.9)
    return lambda: find_roots(p)


def _rk4(steps):
    return lambda: integrate_rk4((1.3, 0.4), (1.5, 1.0, 0.3), 1e-3, steps)


WORKLOADS = [
    ("eigen dim 101", _eigen(101)),
    ("eigen dim 401", _eigen(401)),
    ("roots N=20", _roots(20)),
    ("roots N=60", _roots(60)),
    ("rk4 1e4 steps", _rk4(10_000)),
    ("rk4 1e5 steps", _rk4(100_000)),
]


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled backend not built; timing the python backend only")
    previous = kernels.BACKEND
    results = {}
    try:
        for name in backends:
            kernels.set_backend(name)
            results[name] = [best_time(fn, args.repeat) for _, fn in WORKLOADS]
    finally:
        kernels.set_backend(previous)
    header = f"{'workload':<16}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for i, (label, _) in enumerate(WORKLOADS):
        row = f"{label:<16}" + "".join(f"{results[b][i]:>11.4f}s" for b in backends)
        if len(backends) == 2:
            row += f"{results['python'][i] / results['compiled'][i]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    np.seterr(all="ignore")
    main()
