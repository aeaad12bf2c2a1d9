"""Compare the compiled and pure-Python batch kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints the best-of-``repeat`` time for each kernel and backend and the
speedup.  Also times the end-to-end oracle search both ways, since that
is what the kernels exist for.
"""

import argparse
import time

import numpy as np

from fppsla import kernels, oracle


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def cases(rng):
    T4 = oracle.random_feasible_theta(4, 20_000, rng)
    T3 = oracle.random_feasible_theta(3, 20_000, rng)
    M, X, Y = (oracle._gaussian(rng, (4, 4)) for _ in range(3))
    Ws = oracle.random_sphere_points(4, 3, 1.0, 20_000, rng)
    F = oracle._gaussian(rng, (4, 3))
    s1, s2 = oracle._gaussian(rng, (3,)), np.abs(oracle._gaussian(rng, (3,)))
    h, E = oracle._gaussian(rng, (3,)), oracle._gaussian(rng, (3, 4))
    return {
        "theta_objective_batch N=4 x20k": ("theta_objective_batch", (T4, M, X, Y)),
        "frobenius_distance_batch N=4 x20k": ("frobenius_distance_batch", (T4, M)),
        "w_objective_batch 4x3 x20k": ("w_objective_batch", (Ws, F, s1, s2)),
        "single_user_gain_batch N=3 x20k": ("single_user_gain_batch", (T3, h, E)),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if kernels.compiled_impl is None:
        print("compiled extension not built; only the Python backend is available")
    rng = np.random.default_rng(0)
    print(f"{'kernel':38s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}")
    for label, (name, inputs) in cases(rng).items():
        py = best_time(lambda: getattr(kernels.python_impl, name)(*inputs), args.repeat)
        if kernels.compiled_impl is None:
            print(f"{label:38s} {py * 1e3:9.2f}ms {'-':>10s} {'-':>8s}")
            continue
        cy = best_time(lambda: getattr(kernels.compiled_impl, name)(*inputs), args.repeat)
        print(f"{label:38s} {py * 1e3:9.2f}ms {cy * 1e3:9.2f}ms {py / cy:7.1f}x")
    # sampling dominates the oracle search, so report it separately
    sample = best_time(lambda: oracle.random_feasible_theta(4, 20_000, rng), args.repeat)
    print(f"{'random_feasible_theta N=4 x20k':38s} {sample * 1e3:9.2f}ms")


if __name__ == "__main__":
    main()
