"""Benchmark: compiled sweep kernel vs the NumPy fallback.

Times the descending-scale sweep on uniform 1D instances with grid labels,
the workload that dominates training, then times one full separable-learner
fit per backend. Verifies both backends select identical models.

Usage: python benchmarks/bench_sweep.py [--sizes 1024,4096,10000] [--trials 3]
"""

import argparse
import math
import time

import numpy as np

from medoidnet import default_schedules, get_space, make_distribution
from medoidnet.bounds import q_bound_coefficients
from medoidnet.engine import KERNEL_AVAILABLE, QCoefficients, sweep_1d_numpy
from medoidnet.learners import medoid_net

try:
    from medoidnet.engine import _sweep1d
except ImportError:
    _sweep1d = None


def workload(n, seed=0):
    rng = np.random.default_rng(seed)
    x = np.sort(rng.uniform(0.0, 1.0, n))
    sched = default_schedules()
    eps = sched.eps_n(n)
    L = sched.L_n(n)
    kmax = math.floor(L / eps + 1e-12)
    gv = np.arange(-kmax, kmax + 1, dtype=np.float64) * eps
    lab = np.clip(np.rint(x / eps).astype(np.int64) + kmax, 0, len(gv) - 1)
    coeffs = QCoefficients(*q_bound_coefficients(
        n, sched.b_n(n), sched.delta_n(n), L))
    return x, lab, gv, coeffs


def time_backend(fn, args, trials):
    best = math.inf
    for _ in range(trials):
        t0 = time.perf_counter()
        runs = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, runs


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="1024,4096,10000")
    ap.add_argument("--trials", type=int, default=3)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if not KERNEL_AVAILABLE or _sweep1d is None:
        print("compiled kernel unavailable; timing the NumPy fallback only")

    print(f"{'n':>7} {'runs':>6} {'numpy[s]':>9} {'kernel[s]':>10} {'speedup':>8}")
    for n in sizes:
        x, lab, gv, coeffs = workload(n)
        t_np, runs_np = time_backend(sweep_1d_numpy, (x, lab, gv, coeffs),
                                     args.trials)
        if _sweep1d is not None:
            t_k, runs_k = time_backend(_sweep1d.sweep_1d_kernel,
                                       (x, lab, gv, coeffs), args.trials)
            assert len(runs_np) == len(runs_k)
            assert all(np.array_equal(a.center_positions, b.center_positions)
                       for a, b in zip(runs_np, runs_k))
            print(f"{n:>7} {len(runs_np):>6} {t_np:>9.4f} {t_k:>10.4f} "
                  f"{t_np / t_k:>7.1f}x")
        else:
            print(f"{n:>7} {len(runs_np):>6} {t_np:>9.4f} {'-':>10} {'-':>8}")

    print("\nend-to-end separable fit (lipschitz_identity):")
    dist = make_distribution("lipschitz_identity")
    sched = default_schedules()
    for n in sizes:
        sample = dist.sampler([1, n], n)
        t0 = time.perf_counter()
        model = medoid_net(sample, sched, dist.label_space, dist.instance_space)
        dt = time.perf_counter() - t0
        print(f"  n={n:>6}: {dt:.3f}s  d={model.d} "
              f"gamma*={model.selected_gamma:.5g} alpha*={model.alpha_star:.4f}")


if __name__ == "__main__":
    main()
