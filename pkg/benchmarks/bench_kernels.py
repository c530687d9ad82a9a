"""Time the compiled and pure-Python kernels on representative workloads.

Run ``python3 benchmarks/bench_kernels.py``.  Each case checks that both
backends agree before reporting timings.
"""
import argparse
import time

import numpy as np

from holonomy_sim import kernels
from holonomy_sim.transmon import TwoQubitParams, build_two_qubit_interaction_h, two_qubit_collapse_ops


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def product_case(n, dim, rng):
    a = rng.normal(size=(n, dim, dim)) + 1j * rng.normal(size=(n, dim, dim))
    steps, _ = np.linalg.qr(a)
    return steps, np.eye(dim, dtype=complex)


def lindblad_case(n, kappa=1e-2):
    p = TwoQubitParams()
    H = build_two_qubit_interaction_h(p)
    h = 1e-4
    hs = H.sample(0, h * 0.5 * np.arange(2 * n + 1))
    jumps = [np.sqrt(kappa) * j for j in two_qubit_collapse_ops()]
    decay = sum(j.conj().T @ j for j in jumps)
    K = hs - 0.5j * decay
    rng = np.random.default_rng(1)
    psi = rng.normal(size=(16, 25)) + 1j * rng.normal(size=(16, 25))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    rho = np.einsum("bi,bj->bij", psi, psi.conj())
    return rho, K, jumps, h


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--steps", type=int, default=2000)
    args = ap.parse_args(argv)
    if "cython" not in kernels.BACKENDS:
        print("compiled extension not built; only the Python backend is available")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'case':<34}{'cython [s]':>12}{'python [s]':>12}{'speedup':>10}")
    for dim in (3, 4, 25):
        steps, block = product_case(args.steps, dim, rng)
        a = kernels.ordered_product(steps, block, backend="cython")
        b = kernels.ordered_product(steps, block, backend="python")
        assert np.max(np.abs(a - b)) < 1e-9
        tc = best_of(lambda: kernels.ordered_product(steps, block, backend="cython"), args.repeat)
        tp = best_of(lambda: kernels.ordered_product(steps, block, backend="python"), args.repeat)
        print(f"{f'ordered_product dim={dim} n={args.steps}':<34}{tc:>12.4f}{tp:>12.4f}{tp / tc:>10.1f}")
    n = max(1, args.steps // 10)
    rho, K, jumps, h = lindblad_case(n)
    a = kernels.lindblad_rk4(rho.copy(), K, jumps, h, backend="cython")
    b = kernels.lindblad_rk4(rho.copy(), K, jumps, h, backend="python")
    assert np.max(np.abs(a - b)) < 1e-10
    tc = best_of(lambda: kernels.lindblad_rk4(rho.copy(), K, jumps, h, backend="cython"), args.repeat)
    tp = best_of(lambda: kernels.lindblad_rk4(rho.copy(), K, jumps, h, backend="python"), args.repeat)
    print(f"{f'lindblad_rk4 25 levels x16 n={n}':<34}{tc:>12.4f}{tp:>12.4f}{tp / tc:>10.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
