"""Benchmark the jit-compiled kernels against their pure-numpy twins.

Runs each kernel at a realistic network size (100 nodes) and at larger
synthetic sizes, reports median per-call time for both implementations and
the speedup. The jit path is warmed up before timing so compilation cost is
excluded. Usage:

    python benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from wsncluster.kernels import IMPLEMENTATIONS


def _make_inputs(n: int, rng: np.random.Generator) -> dict[str, tuple]:
    xs = rng.uniform(0.0, 100.0, n)
    ys = rng.uniform(0.0, 100.0, n)
    head_count = max(1, n // 10)
    head_ids = np.sort(rng.choice(n, size=head_count, replace=False)).astype(np.int64)
    member_ids = np.setdiff1d(np.arange(n, dtype=np.int64), head_ids)
    alive = np.ones(n, dtype=bool)
    sensing = np.full(n, 15.0)
    pois = 4 * n
    px = rng.uniform(0.0, 100.0, pois)
    py = rng.uniform(0.0, 100.0, pois)
    d2_bs = (xs[head_ids] - 50.0) ** 2 + (ys[head_ids] - 150.0) ** 2
    dists = rng.uniform(0.0, 150.0, n)
    return {
        "assign_nearest": (xs, ys, member_ids, head_ids),
        "farthest_audience": (xs, ys, head_ids, member_ids),
        "route_next_hop": (xs[head_ids], ys[head_ids], d2_bs),
        "tx_energy_vec": (4000.0, dists, 50e-9, 10e-12, 0.0013e-12, 87.70580193070292),
        "poi_coverage": (xs, ys, alive, sensing, px, py),
        "bfs_levels": (xs, ys, alive, 0, 25.0),
    }


def _time_call(fn, args, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    parser.add_argument("--sizes", default="100,1000,5000",
                        help="comma-separated node counts")
    args = parser.parse_args()

    numpy_impl = IMPLEMENTATIONS["numpy"]
    numba_impl = IMPLEMENTATIONS["numba"]
    if numba_impl is None:
        print("numba unavailable; nothing to compare")
        return 0

    rng = np.random.default_rng(0)
    sizes = [int(s) for s in args.sizes.split(",")]
    print(f"{'kernel':<20} {'n':>6} {'numpy':>12} {'numba':>12} {'speedup':>8}")
    for n in sizes:
        inputs = _make_inputs(n, rng)
        for name, call_args in inputs.items():
            numba_impl[name](*call_args)  # warm-up: trigger compilation
            t_np = _time_call(numpy_impl[name], call_args, args.repeats)
            t_nb = _time_call(numba_impl[name], call_args, args.repeats)
            print(f"{name:<20} {n:>6} {t_np * 1e6:>10.1f}us {t_nb * 1e6:>10.1f}us "
                  f"{t_np / t_nb:>7.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
