"""Command-line entry points."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .engine import PathingConfig, elastic_pathing
from .evaluation import (
    DriveProfile,
    EvalJob,
    Method,
    bin_report,
    export_geojson,
    run_batch,
    run_synthetic,
    write_geojson,
)
from .mapgraph import count_paths_within_distance, load_osm
from .routing import RoutingScoreParams, rerank_top_k
from .trace import GpsFix, gps_to_speed, read_gps_csv, read_speed_csv, split_trips, write_speed_csv


def _latlon(text: str) -> tuple[float, float]:
    try:
        lat, lon = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LAT,LON, got {text!r}") from None
    return lat, lon


def _config(args) -> PathingConfig:
    return PathingConfig(delta=args.delta, use_speed_limits=not args.no_speed_limits)


def cmd_path(args) -> int:
    graph = load_osm(args.map)
    trace = read_speed_csv(args.trace)
    start = graph.nearest_node(*args.start)
    out = elastic_pathing(graph, start, trace, _config(args))
    if not out.completes:
        print(json.dumps({"start_node": start, "candidates": [], "explored": out.explored_count}))
        return 1
    ranked = [(p, None) for p in out.completes]
    if args.routing:
        scored = rerank_top_k(out, graph, start, trace.total_distance or 1.0, RoutingScoreParams.with_beta(args.beta))
        ranked = [(s.path, s.comb_score) for s in scored]
    cands = []
    for rank, (p, score) in enumerate(ranked, start=1):
        lat, lon = p.end_point(graph)
        row = {"rank": rank, "error_m": p.error, "destination": [lat, lon], "nodes": p.nodes}
        if score is not None:
            row["comb_score"] = score
        cands.append(row)
    print(json.dumps({"start_node": start, "explored": out.explored_count, "truncated": out.truncated,
                      "candidates": cands}, indent=1))
    if args.geojson:
        write_geojson(export_geojson(out, graph, start), args.geojson)
    return 0


def _read_starts(path: Path) -> dict[str, dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return {r["trace_id"]: r for r in csv.DictReader(fh)}


def _report(records, extra: dict | None = None) -> dict:
    doc = {"records": [r.to_json() for r in records]}
    known = [r for r in records if r.destination_error is not None]
    if known:
        doc["histogram"] = bin_report(known).to_json()
    doc.update(extra or {})
    return doc


def cmd_batch(args) -> int:
    """Starts CSV columns: trace_id, start_lat, start_lon, and optionally end_lat, end_lon."""
    graph = load_osm(args.map)
    starts = _read_starts(args.starts)
    jobs = []
    for f in sorted(Path(args.traces).glob("*.csv")):
        row = starts.get(f.stem)
        if row is None:
            logging.warning("no start for trace %s, skipped", f.stem)
            continue
        trace = read_speed_csv(f)
        truth = None
        if row.get("end_lat") and row.get("end_lon"):
            truth = GpsFix(trace.samples[-1].t, float(row["end_lat"]), float(row["end_lon"]))
        start = graph.nearest_node(float(row["start_lat"]), float(row["start_lon"]))
        jobs.append(EvalJob(f.stem, start, trace, truth, Method.ELASTIC))
        if truth is not None:
            jobs.append(EvalJob(f.stem, start, trace, truth, Method.NAIVE, seed=args.seed + len(jobs)))
    records = run_batch(graph, jobs, _config(args), workers=args.workers)
    elastic = [r for r in records if r.method is Method.ELASTIC]
    naive = [r for r in records if r.method is Method.NAIVE and r.destination_error is not None]
    extra = {"naive_histogram": bin_report(naive).to_json()} if naive else {}
    doc = _report(elastic, extra)
    Path(args.out).write_text(json.dumps(doc, indent=1))
    print(f"{len(elastic)} traces -> {args.out}")
    return 0


def cmd_eval_synthetic(args) -> int:
    profile = DriveProfile(stop_probability_at_junction=args.stop_probability)
    rep = run_synthetic(args.grid, args.spacing, args.trips, args.seed, args.repeats, profile,
                        _config(args), jitter=args.jitter, workers=args.workers)
    doc = rep.to_json()
    Path(args.out).write_text(json.dumps(doc, indent=1))
    hist = bin_report(rep.records)
    print(hist.format_table())
    print(f"elastic within 250 m: {100 * doc['within_250m']:.2f}%")
    if rep.naive_runs:
        nw = rep.naive_within(250.0)
        print(f"naive within 250 m over {len(rep.naive_runs)} runs: min {100 * nw['min']:.2f}% "
              f"avg {100 * nw['avg']:.2f}% max {100 * nw['max']:.2f}%")
    return 0


def cmd_count_paths(args) -> int:
    graph = load_osm(args.map)
    start = graph.nearest_node(*args.start)
    print(json.dumps(count_paths_within_distance(graph, start, args.radius).to_json()))
    return 0


def cmd_gps2speed(args) -> int:
    trace = gps_to_speed(read_gps_csv(args.inp))
    write_speed_csv(trace, args.out)
    print(f"{len(trace)} samples, {trace.total_distance:.1f} m -> {args.out}")
    return 0


def cmd_split(args) -> int:
    trips = split_trips(read_speed_csv(args.inp))
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.inp).stem
    for k, t in enumerate(trips):
        write_speed_csv(t, out / f"{stem}_{k:03d}.csv")
    print(f"{len(trips)} trips -> {out}")
    return 0


def _pathing_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delta", type=float, default=1.1)
    p.add_argument("--no-speed-limits", action="store_true", help="disable speed-limit pruning")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="elasticpath", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("path", help="rank candidate routes for one trace")
    p.add_argument("--map", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--start", required=True, type=_latlon, metavar="LAT,LON")
    p.add_argument("--routing", action="store_true", help="rerank the top candidates by route agreement")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--geojson", metavar="OUT.json")
    _pathing_flags(p)
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("batch", help="evaluate a directory of traces")
    p.add_argument("--map", required=True)
    p.add_argument("--traces", required=True, metavar="DIR")
    p.add_argument("--starts", required=True, metavar="FILE.csv")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    _pathing_flags(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("eval-synthetic", help="benchmark on a simulated grid city")
    p.add_argument("--grid", type=int, default=10)
    p.add_argument("--spacing", type=float, default=150.0)
    p.add_argument("--trips", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=10, help="naive-guess repetitions")
    p.add_argument("--jitter", type=float, default=0.2)
    p.add_argument("--stop-probability", type=float, default=0.5)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    _pathing_flags(p)
    p.set_defaults(func=cmd_eval_synthetic)

    p = sub.add_parser("count-paths", help="count distinct paths within a radius")
    p.add_argument("--map", required=True)
    p.add_argument("--start", required=True, type=_latlon, metavar="LAT,LON")
    p.add_argument("--radius", required=True, type=float)
    p.set_defaults(func=cmd_count_paths)

    p = sub.add_parser("gps2speed", help="convert a GPS track to a speed trace")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gps2speed)

    p = sub.add_parser("split", help="cut a long recording into trips")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_split)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"elasticpath: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
