#!/usr/bin/env python3
"""Measure segmentation wall time against cell count.

Prints per-size totals and the deviation of each point from a least
squares linear fit; the engine promises roughly linear scaling.
"""

import argparse
import random
import time

from symgrid import Grid, segment


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sides", type=int, nargs="+", default=[10, 20, 30])
    parser.add_argument("--reps", type=int, default=300)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    totals = {}
    for side in args.sides:
        batch = [
            Grid.from_rows(
                [[rng.randrange(10) for _ in range(side)] for _ in range(side)]
            )
            for _ in range(args.reps)
        ]
        best = None
        for _ in range(3):
            start = time.perf_counter()
            for g in batch:
                segment(g)
            elapsed = time.perf_counter() - start
            best = elapsed if best is None else min(best, elapsed)
        totals[side] = best

    xs = [s * s for s in args.sides]
    ys = [totals[s] for s in args.sides]
    xbar = sum(xs) / len(xs)
    ybar = sum(ys) / len(ys)
    slope = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / sum(
        (x - xbar) ** 2 for x in xs
    )
    intercept = ybar - slope * xbar
    print(f"fit: t = {intercept:.2e} + {slope:.2e} * cells")
    for side in args.sides:
        t = totals[side]
        predicted = intercept + slope * side * side
        ratio = max(predicted / t, t / predicted) if predicted > 0 else float("inf")
        print(
            f"{side:>3}x{side:<3} cells={side * side:>4} "
            f"time={t:.4f}s fit={predicted:.4f}s deviation={ratio:.2f}x"
        )


if __name__ == "__main__":
    main()
