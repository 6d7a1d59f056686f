"""Write a grid-city OSM file and one simulated trip, ready for the CLI."""

import argparse
import json
import random
from pathlib import Path

from elasticpath.evaluation import make_grid_map, random_route, simulate_drive, to_osm_xml
from elasticpath.trace import write_speed_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="demo")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out = Path(args.outdir)
    (out / "traces").mkdir(parents=True, exist_ok=True)
    g = make_grid_map(10, 150.0, jitter=0.2, seed=args.seed)
    (out / "map.osm").write_text(to_osm_xml(g))
    rng = random.Random(args.seed)
    rows = ["trace_id,start_lat,start_lon,end_lat,end_lon"]
    for k in range(5):
        route = random_route(g, rng, 1500.0)
        trace, truth = simulate_drive(g, route, seed=rng.randrange(2**31))
        write_speed_csv(trace, out / "traces" / f"trip{k}.csv")
        s = g.nodes[route[0]]
        rows.append(f"trip{k},{s.lat!r},{s.lon!r},{truth.lat!r},{truth.lon!r}")
    (out / "starts.csv").write_text("\n".join(rows) + "\n")
    first = rows[1].split(",")
    print(json.dumps({"map": str(out / "map.osm"), "trace": str(out / "traces" / "trip0.csv"),
                      "start": f"{first[1]},{first[2]}", "truth": f"{first[3]},{first[4]}"}))


if __name__ == "__main__":
    main()
