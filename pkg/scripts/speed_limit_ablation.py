"""Accuracy with and without speed-limit pruning on a grid with a fast spine road."""

import argparse
import random

from elasticpath.engine import PathingConfig
from elasticpath.evaluation import DriveProfile, EvalJob, make_grid_map, random_route, run_batch, simulate_drive, within_rate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=10)
    ap.add_argument("--spacing", type=float, default=150.0)
    ap.add_argument("--trips", type=int, default=50)
    ap.add_argument("--seeds", type=int, nargs="+", default=list(range(5)))
    ap.add_argument("--cruise", type=float, default=25.0, help="m/s; capped by each way's limit")
    args = ap.parse_args()

    print(f"{'seed':>4}  {'on <250':>8}  {'off <250':>8}  {'on <500':>8}  {'off <500':>8}  {'explored on/off':>16}")
    for seed in args.seeds:
        g = make_grid_map(args.grid, args.spacing, jitter=0.2, highway_spine=True, seed=seed)
        rng = random.Random(seed)
        jobs = []
        for k in range(args.trips):
            route = random_route(g, rng, 1500.0)
            trace, truth = simulate_drive(g, route, DriveProfile(cruise_speed=args.cruise), seed=rng.randrange(2**31))
            jobs.append(EvalJob(f"t{k}", route[0], trace, truth))
        on = run_batch(g, jobs, PathingConfig())
        off = run_batch(g, jobs, PathingConfig(use_speed_limits=False))
        e_on = sum(r.explored_count for r in on)
        e_off = sum(r.explored_count for r in off)
        print(f"{seed:>4}  {100 * within_rate(on, 250):>7.1f}%  {100 * within_rate(off, 250):>7.1f}%  "
              f"{100 * within_rate(on, 500):>7.1f}%  {100 * within_rate(off, 500):>7.1f}%  {e_on:>7}/{e_off:<8}")


if __name__ == "__main__":
    main()
