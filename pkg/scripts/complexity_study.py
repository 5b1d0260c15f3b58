#!/usr/bin/env python3
"""Scaling study for basis construction across all synthetic shapes.

Prints a table of best-of-N timings per shape and size plus the fitted
log-log growth exponent.  A wider and slower sweep than ``sandra bench``;
useful when revisiting the cost model.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sandra import SHAPES, build_all_bases, synthesize


def measure(shape: str, size: int, seed: int, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        onto = synthesize(shape, size, seed)
        start = time.perf_counter()
        build_all_bases(onto)
        best = min(best, max(time.perf_counter() - start, 1e-9))
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="32,64,128,256,512")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]

    for shape in SHAPES:
        times = []
        print(f"shape {shape}")
        for size in sizes:
            t = measure(shape, size, args.seed, args.repeats)
            times.append(t)
            print(f"  |D| = {size:5d}: {t * 1000:10.3f} ms")
        if len(sizes) >= 2:
            exponent = float(np.polyfit(np.log(sizes), np.log(times), 1)[0])
            print(f"  growth exponent {exponent:.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
