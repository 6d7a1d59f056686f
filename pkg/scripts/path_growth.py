"""Number of distinct paths within a radius of a start node, on grid cities."""

import argparse
import json

from elasticpath.evaluation import grid_node_id, make_grid_map
from elasticpath.mapgraph import count_paths_within_distance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=15)
    ap.add_argument("--spacing", type=float, default=100.0)
    ap.add_argument("--jitter", type=float, default=0.0)
    ap.add_argument("--max-multiple", type=int, default=7)
    ap.add_argument("--cap", type=int, default=10**7)
    ap.add_argument("--out")
    args = ap.parse_args()

    g = make_grid_map(args.grid, args.spacing, jitter=args.jitter)
    mid = args.grid // 2
    start = grid_node_id(args.grid, mid, mid)
    rows = []
    print(f"{'radius m':>9}  {'paths':>10}")
    for k in range(1, args.max_multiple + 1):
        # radii sit just below each multiple of the spacing; see the acceptance suite
        pc = count_paths_within_distance(g, start, k * args.spacing * 0.999, cap=args.cap)
        rows.append(pc.to_json())
        print(f"{k * args.spacing:>9.0f}  {pc.path_count:>10}{' (capped)' if pc.capped else ''}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
