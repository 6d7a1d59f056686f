"""Static GeoJSON export of ranked candidate paths."""

from __future__ import annotations

import json
from pathlib import Path

from ..engine import PathingOutcome, point_along
from ..mapgraph import RoadGraph


def _line(graph: RoadGraph, nodes, dists=None, end=None) -> list[list[float]]:
    coords = []
    for k, nid in enumerate(nodes):
        if end is not None and dists is not None and k > 0 and dists[k] > end:
            lat, lon = point_along(graph, nodes, dists, end)
            coords.append([lon, lat])
            break
        n = graph.nodes[nid]
        coords.append([n.lon, n.lat])
    if len(coords) == 1:
        coords.append(list(coords[0]))
    return coords


def export_geojson(outcome: PathingOutcome, graph: RoadGraph, start: int, truth: list[int] | None = None) -> dict:
    """FeatureCollection of the start marker, every ranked candidate and the optional true route."""
    s = graph.nodes[start]
    features = [{
        "type": "Feature",
        "geometry": {"type": "Point", "coordinates": [s.lon, s.lat]},
        "properties": {"role": "start", "node": start},
    }]
    for rank, p in enumerate(outcome.completes, start=1):
        features.append({
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": _line(graph, p.nodes, p.dists, p.final_distance)},
            "properties": {"role": "candidate", "rank": rank, "error_m": p.error},
        })
    if truth:
        features.append({
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": _line(graph, truth)},
            "properties": {"role": "truth"},
        })
    return {"type": "FeatureCollection", "features": features}


def write_geojson(doc: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(doc, indent=1))
