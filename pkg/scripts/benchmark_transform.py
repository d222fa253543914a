#!/usr/bin/env python3
"""Benchmark the forward transform across image sizes and thread counts.

Prints one CSV block per image size: threads, median wall time, and
speedup relative to single-threaded. Thread counts beyond what the host
supports are skipped.

Usage:
    python scripts/benchmark_transform.py --sizes 100 200 400 --channels 64
"""

import argparse
import math
import statistics
import time

import numpy as np

import dhtline as d
from dhtline.hough import max_threads


def bench_size(size: int, channels: int, iters: int, thread_counts, rng):
    dims = d.ImageDims(size, size)
    grid = d.grid_from_intervals(dims, math.pi / 100, math.sqrt(2.0))
    x = rng.random((channels, size, size))
    d.dht_forward(x, grid)  # warm the kernel / plan cache
    print(f"# size {size}x{size}, {channels} channels, grid {grid.n_theta}x{grid.n_r}")
    print("threads,median_ms,speedup")
    base = None
    for n in thread_counts:
        if n > max_threads():
            print(f"# skipping {n} threads (host supports {max_threads()})")
            continue
        samples = []
        for _ in range(iters):
            start = time.perf_counter()
            d.dht_forward(x, grid, n_threads=n)
            samples.append(time.perf_counter() - start)
        med = statistics.median(samples) * 1e3
        if base is None:
            base = med
        print(f"{n},{med:.3f},{base / med:.2f}")
    print()


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--channels", type=int, default=64)
    ap.add_argument("--iters", type=int, default=10)
    ap.add_argument("--thread-counts", type=int, nargs="+", default=[1, 2, 4])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    for size in args.sizes:
        bench_size(size, args.channels, args.iters, args.thread_counts, rng)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
