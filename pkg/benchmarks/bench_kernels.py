"""Time the numba and numpy kernel backends on representative workloads.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is called once untimed (JIT compilation / cache load), then the
best of ``--repeat`` runs is reported along with the max relative
difference between the two backends.
"""
import argparse
import time

import numpy as np

from inghamlab import kernels


def workloads():
    lam = np.linspace(0.0, 200.0, 400)
    r = np.linspace(0.0, 12.0, 1500)
    rj = np.ascontiguousarray(np.linspace(0.0, 6.0, 800))
    z = (np.linspace(0.1, 60.0, 20000) + 1j * np.linspace(-40.0, 40.0, 20000)).astype(np.complex128)
    x = np.arange(20000) * 1e-3
    v = np.exp(-((x - 10.0) / 2.0) ** 2)
    return {
        "bessel_psi_matrix 400x1500": lambda k: k.bessel_psi_matrix(1.5, lam, r),
        "jacobi_phi_matrix 100x800": lambda k: k.jacobi_phi_matrix(1.0, 0.0, lam[::4], rj),
        "loggamma_array 2e4": lambda k: k.loggamma_array(z),
        "log_c_array 2e4": lambda k: k.log_c_array(0.5, -0.5, z.real.astype(np.complex128)),
        "box_average 2e4 x 16": lambda k: [k.box_average(v, 1e-3, a) for a in np.geomspace(1e-3, 1.0, 16)],
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    jit, npy = kernels.load("numba"), kernels.load("numpy")
    print(f"{'kernel':<28}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}{'max rel diff':>14}")
    for name, call in workloads().items():
        call(jit)  # compile or load from cache
        tj, a = best_of(lambda: call(jit), args.repeat)
        tn, b = best_of(lambda: call(npy), args.repeat)
        a, b = np.asarray(a), np.asarray(b)
        diff = float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1.0)))
        print(f"{name:<28}{1e3 * tj:>12.2f}{1e3 * tn:>12.2f}{tn / tj:>10.1f}{diff:>14.1e}")


if __name__ == "__main__":
    main()
