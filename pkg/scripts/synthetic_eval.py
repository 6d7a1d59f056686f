"""Grid-city benchmark across seeds: elastic pathing against naive guessing."""

import argparse
import json

from elasticpath.evaluation import DriveProfile, bin_report, run_synthetic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=10)
    ap.add_argument("--spacing", type=float, default=150.0)
    ap.add_argument("--trips", type=int, default=50)
    ap.add_argument("--seeds", type=int, nargs="+", default=list(range(10)))
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--stop-probability", type=float, default=0.5)
    ap.add_argument("--jitter", type=float, default=0.2)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out")
    args = ap.parse_args()

    rows = []
    print(f"{'seed':>4}  {'elastic<250m':>12}  {'naive min/avg/max':>20}  {'ratio':>6}")
    for seed in args.seeds:
        rep = run_synthetic(args.grid, args.spacing, args.trips, seed, args.repeats,
                            DriveProfile(stop_probability_at_junction=args.stop_probability),
                            jitter=args.jitter, workers=args.workers)
        doc = rep.to_json()
        nw = rep.naive_within(250.0)
        ratio = doc["within_250m"] / nw["avg"] if nw["avg"] else float("inf")
        rows.append({"seed": seed, "elastic_within_250m": doc["within_250m"], "naive_within_250m": nw,
                     "histogram": doc["histogram"]})
        print(f"{seed:>4}  {100 * doc['within_250m']:>11.1f}%  "
              f"{100 * nw['min']:>5.1f}/{100 * nw['avg']:>5.1f}/{100 * nw['max']:>5.1f}%  {ratio:>6.2f}")
        if seed == args.seeds[0]:
            print(bin_report(rep.records).format_table())
    mean = sum(r["elastic_within_250m"] for r in rows) / len(rows)
    print(f"mean elastic within 250 m over {len(rows)} seeds: {100 * mean:.1f}%")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
