"""Timing comparison of the compiled and pure kernel backends.

Runs each kernel at the scale of one Monte Carlo trial (dimension 4,
horizon 500) and prints the median wall time per call plus the speedup.
Also asserts that both backends return byte-identical results on the
benchmark inputs.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import statistics
import time

import numpy as np

from topoid import kernels


def _median_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def _inputs(seed=0, n=4, T=500):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(n, n))
    theta = 0.9 * M / np.abs(np.linalg.eigvals(M)).max()
    x0 = rng.normal(size=n)
    noise = rng.normal(size=(T, n))
    states = kernels.simulate_path(theta, x0, noise)
    horizons = np.array([10, 20, 50, 100, 200, 500])
    R = 5e8 * np.eye(n)
    return theta, x0, noise, states, horizons, R


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=25,
                        help="timing repetitions per kernel (default 25)")
    args = parser.parse_args()

    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled extension not installed; timing pure backend only")

    theta, x0, noise, states, horizons, R = _inputs()
    n = theta.shape[0]
    eye = np.eye(n)
    cases = {
        "simulate_path (n=4, T=500)": lambda mod: kernels.simulate_path(
            theta, x0, noise, module=mod
        ),
        "ls_scan (n=4, T=500, 6 horizons)": lambda mod: kernels.ls_scan(
            states, horizons, module=mod
        ),
        "dare_fixed_point (n=4, stiff R)": lambda mod: kernels.dare_fixed_point(
            theta, eye, eye, R, 1e-12, 100_000, module=mod
        ),
    }

    print(f"{'kernel':<34} {'pure':>12} {'compiled':>12} {'speedup':>9}")
    for label, call in cases.items():
        pure_mod = kernels.get_backend("pure")
        t_pure = _median_time(lambda: call(pure_mod), args.repeat)
        line = f"{label:<34} {t_pure * 1e3:>10.3f}ms"
        if "compiled" in backends:
            comp_mod = kernels.get_backend("compiled")
            a = call(pure_mod)
            b = call(comp_mod)
            flat_a = a if isinstance(a, tuple) else (a,)
            flat_b = b if isinstance(b, tuple) else (b,)
            for x, y in zip(flat_a, flat_b):
                xb = x.tobytes() if hasattr(x, "tobytes") else repr(x).encode()
                yb = y.tobytes() if hasattr(y, "tobytes") else repr(y).encode()
                assert xb == yb, f"backend mismatch in {label}"
            t_comp = _median_time(lambda: call(comp_mod), args.repeat)
            line += f" {t_comp * 1e3:>10.3f}ms {t_pure / t_comp:>8.1f}x"
        print(line)
    print("results verified byte-identical across backends")


if __name__ == "__main__":
    main()
