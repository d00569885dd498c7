"""Benchmark the compiled kernels against the pure NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--repeats N]

The bootstrap loop is the workload that motivates the extension: hundreds
of refits on modest arrays, where per-call Python overhead dominates the
pure path. Large single fits are closer because NumPy already vectorizes
their inner sums.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from vulnlife._kernels import pure

try:
    from vulnlife._kernels import _core as core
except ImportError:
    core = None


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _workloads(rng):
    km_times = rng.integers(0, 3000, 200_000).astype(float)
    km_events = (rng.random(200_000) < 0.8).astype(np.int64)
    big = rng.gamma(2.5, 40.0, 50_000)
    sorted_big = np.sort(big)
    boot = {
        0: np.sort(rng.exponential(3.0, (250, 150)), axis=1),
        1: np.sort(3.0 * rng.weibull(1.7, (250, 150)), axis=1),
        2: np.sort(rng.gamma(2.5, 8.0, (250, 150)), axis=1),
        3: np.sort(rng.lognormal(1.0, 0.6, (250, 150)), axis=1),
    }
    return [
        ("km_curve n=200k", lambda m: m.km_curve(km_times, km_events)),
        ("fit_gamma n=50k", lambda m: m.fit_gamma(big)),
        ("fit_weibull n=50k", lambda m: m.fit_weibull(big)),
        ("ad_statistic n=50k", lambda m: m.ad_statistic(2, 2.5, 0.025, sorted_big)),
        ("bootstrap expon 250x150", lambda m: m.ad_bootstrap(0, boot[0])),
        ("bootstrap weibull 250x150", lambda m: m.ad_bootstrap(1, boot[1])),
        ("bootstrap gamma 250x150", lambda m: m.ad_bootstrap(2, boot[2])),
        ("bootstrap lognorm 250x150", lambda m: m.ad_bootstrap(3, boot[3])),
    ]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'workload':<26} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    for name, call in _workloads(rng):
        pure_s = _time(lambda: call(pure), args.repeats)
        if core is None:
            print(f"{name:<26} {pure_s * 1e3:>8.2f}ms {'n/a':>10} {'n/a':>8}")
            continue
        core_s = _time(lambda: call(core), args.repeats)
        print(
            f"{name:<26} {pure_s * 1e3:>8.2f}ms {core_s * 1e3:>8.2f}ms "
            f"{pure_s / core_s:>7.1f}x"
        )
    if core is None:
        print("\ncompiled extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()
