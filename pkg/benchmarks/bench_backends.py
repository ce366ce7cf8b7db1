"""Timing comparison between the compiled kernels and the pure-Python
fallback.

Run with:

    python benchmarks/bench_backends.py [--repeat 5]

Each kernel is timed on a fixed workload with both implementations; the
table reports the best-of-N wall time per call and the speedup of the
compiled extension.
"""

import argparse
import math
import time

import numpy as np

from spheredubins import _core_py

try:
    from spheredubins import _core
except ImportError:
    _core = None


def best_of(repeat, fn, *args):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    rng = np.random.default_rng(0)
    g0 = np.eye(3)
    omega = np.array([1.0, 0.0, 1.0])
    s_grid = rng.uniform(0.0, 2.0 * math.pi, size=5000)
    mats = _core_py.exp_batch(omega, s_grid)
    target = _core_py.rodrigues(np.array([0.3, -0.2, 0.9]), 1.1)
    state = np.array([0.1, 0.3, 0.5, 0.2, -0.3, 0.8])
    return [
        ("rodrigues x1000",
         lambda core: [core.rodrigues(omega, 0.001 * i) for i in range(1000)]),
        ("rk4_frame s=2pi step=1e-3",
         lambda core: core.rk4_frame(g0, 1.0, 2.0 * math.pi, 1e-3, 16)),
        ("rk4_spherical s=2pi step=1e-3",
         lambda core: core.rk4_spherical(0.1, 0.2, 0.3, 0.5, 1.0,
                                         2.0 * math.pi, 1e-3)),
        ("rk4_spherical_adjoint s=2pi step=1e-3",
         lambda core: core.rk4_spherical_adjoint(state, 1.0, 1.0,
                                                 2.0 * math.pi, 1e-3)),
        ("rk4_costate s=2pi step=1e-3",
         lambda core: core.rk4_costate(0.75, -0.4, 0.25, -1.0,
                                       2.0 * math.pi, 1e-3)),
        ("exp_batch n=5000",
         lambda core: core.exp_batch(omega, s_grid)),
        ("rotvec_batch n=5000",
         lambda core: core.rotvec_batch(mats)),
        ("angle_to_batch n=5000",
         lambda core: core.angle_to_batch(mats, target)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5,
                        help="repetitions per kernel (best is kept)")
    args = parser.parse_args()

    if _core is None:
        print("compiled extension not available; showing python-only times")
    header = f"{'kernel':38s} {'python':>10s} {'cython':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, call in workloads():
        t_py = best_of(args.repeat, call, _core_py)
        if _core is None:
            print(f"{name:38s} {t_py * 1e3:9.3f}ms {'-':>10s} {'-':>8s}")
            continue
        t_cy = best_of(args.repeat, call, _core)
        ratio = t_py / t_cy if t_cy > 0 else float("inf")
        print(f"{name:38s} {t_py * 1e3:9.3f}ms {t_cy * 1e3:9.3f}ms "
              f"{ratio:7.1f}x")


if __name__ == "__main__":
    main()
