"""Effect of the routing rerank on accuracy, for several weights beta."""

import argparse
import random

from elasticpath.engine import PathingConfig, elastic_pathing
from elasticpath.evaluation import EvalJob, Method, make_grid_map, random_route, run_batch, simulate_drive, within_rate
from elasticpath.routing import RoutingScoreParams, shortest_route
from elasticpath.trace import SpeedTrace


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=10)
    ap.add_argument("--spacing", type=float, default=150.0)
    ap.add_argument("--trips", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--betas", type=float, nargs="+", default=[1.0, 0.8, 0.5, 0.2])
    ap.add_argument("--shortest", action="store_true", help="drive shortest routes instead of random walks")
    ap.add_argument("--gain", type=float, default=0.05,
                    help="speedometer calibration error: speeds scaled by a factor in [1-gain, 1+gain]")
    args = ap.parse_args()

    g = make_grid_map(args.grid, args.spacing, jitter=0.2, seed=args.seed)
    rng = random.Random(args.seed)
    nodes = sorted(g.nodes)
    jobs = []
    while len(jobs) < args.trips:
        if args.shortest:
            a, b = rng.sample(nodes, 2)
            route = shortest_route(g, a, b)[0]
            if sum(g.edge(x, y).length for x, y in zip(route, route[1:])) < 600:
                continue
        else:
            route = random_route(g, rng, 1500.0)
        trace, truth = simulate_drive(g, route, seed=rng.randrange(2**31))
        k = 1.0 + rng.uniform(-args.gain, args.gain)
        trace = SpeedTrace.from_arrays(trace.times, trace.speeds * k, trace.source)
        jobs.append(EvalJob(f"t{len(jobs)}", route[0], trace, truth, Method.ELASTIC))
    base = run_batch(g, jobs, PathingConfig(delta=3.0))
    counts = [len(elastic_pathing(g, j.start, j.trace, PathingConfig(delta=3.0)).completes) for j in jobs]
    print(f"routes: {'shortest' if args.shortest else 'random walks'}, gain +-{args.gain}, delta 3.0; "
          f"mean candidates per trip {sum(counts) / len(counts):.2f}")
    print(f"{'method':>18}  {'<250 m':>7}  {'<500 m':>7}")
    print(f"{'elastic':>18}  {100 * within_rate(base, 250):>6.1f}%  {100 * within_rate(base, 500):>6.1f}%")
    for beta in args.betas:
        rjobs = [EvalJob(j.trace_id, j.start, j.trace, j.truth, Method.ELASTIC_ROUTING) for j in jobs]
        recs = run_batch(g, rjobs, PathingConfig(delta=3.0), RoutingScoreParams.with_beta(beta))
        print(f"{'routing beta=' + str(beta):>18}  {100 * within_rate(recs, 250):>6.1f}%  {100 * within_rate(recs, 500):>6.1f}%")


if __name__ == "__main__":
    main()
