"""Synthetic grid maps and simulated drives with known ground truth."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..geo import MPH, offset_latlon
from ..kinematics import TurnModelParams, turn_speed_limit
from ..mapgraph import DEFAULT_MAX_SPEED, RoadGraph, RoadNode, RoadWay, neighbors, turn_geometry
from ..trace import GpsFix, Source, SpeedTrace

DEFAULT_ORIGIN = (40.5, -74.45)


def make_grid_map(
    n: int,
    spacing: float,
    limits: Mapping[str, float] | None = None,
    origin: tuple[float, float] = DEFAULT_ORIGIN,
    jitter: float = 0.0,
    highway_spine: bool = False,
    spine_class: str = "trunk",
    seed: int = 0,
) -> RoadGraph:
    """n x n grid of two-way residential streets ``spacing`` meters apart.

    ``jitter`` displaces every node by up to that fraction of ``spacing`` in
    each axis, which breaks the grid's otherwise perfect homogeneity. With
    ``highway_spine`` the middle row becomes a faster ``spine_class`` road.
    """
    if n < 2 or spacing <= 0:
        raise ValueError("need n >= 2 and positive spacing")
    if not 0 <= jitter < 0.5:
        raise ValueError("jitter must lie in [0, 0.5)")
    speeds = dict(DEFAULT_MAX_SPEED)
    speeds.update(limits or {})
    rng = random.Random(seed)
    nodes = []
    for r in range(n):
        for c in range(n):
            east = c * spacing + rng.uniform(-jitter, jitter) * spacing
            north = r * spacing + rng.uniform(-jitter, jitter) * spacing
            lat, lon = offset_latlon(origin[0], origin[1], east, north)
            nodes.append(RoadNode(grid_node_id(n, r, c), lat, lon))

    def way(wid, seq, cls):
        v = speeds[cls]
        return RoadWay(wid, tuple(seq), v, highway_class=cls, maxspeed_tag=f"{v / MPH:.6f} mph")

    ways = []
    for r in range(n):
        cls = spine_class if highway_spine and r == n // 2 else "residential"
        ways.append(way(1_000_000 + r, [grid_node_id(n, r, c) for c in range(n)], cls))
    for c in range(n):
        ways.append(way(2_000_000 + c, [grid_node_id(n, r, c) for r in range(n)], "residential"))
    meta = {"kind": "grid", "n": n, "spacing": spacing, "jitter": jitter, "seed": seed}
    return RoadGraph.from_ways(nodes, ways, meta)


def grid_node_id(n: int, r: int, c: int) -> int:
    return r * n + c + 1


@dataclass(frozen=True)
class DriveProfile:
    cruise_speed: float = 13.0
    accel: float = 1.5
    decel: float = 2.0
    stop_probability_at_junction: float = 0.5
    stop_duration: float = 10.0
    turn_speed_factor: float = 0.7

    def __post_init__(self):
        if min(self.cruise_speed, self.accel, self.decel, self.stop_duration) <= 0:
            raise ValueError("profile magnitudes must be positive")
        if not 0.0 <= self.stop_probability_at_junction <= 1.0:
            raise ValueError("stop probability must lie in [0, 1]")
        if not 0.0 < self.turn_speed_factor <= 1.0:
            raise ValueError("turn_speed_factor must lie in (0, 1]")


def random_route(graph: RoadGraph, rng: random.Random, min_length: float, start: int | None = None,
                 max_tries: int = 200) -> list[int]:
    """Random walk without U-turns or repeated directed edges, at least ``min_length`` long."""
    nodes = sorted(graph.adjacency)
    for _ in range(max_tries):
        route = [start if start is not None else rng.choice(nodes)]
        used = set()
        length = 0.0
        while length < min_length:
            prev = route[-2] if len(route) > 1 else None
            options = [e for e in neighbors(graph, route[-1], prev) if (route[-1], e.target) not in used]
            if not options:
                break
            e = rng.choice(options)
            used.add((route[-1], e.target))
            route.append(e.target)
            length += e.length
        if length >= min_length:
            return route
    raise RuntimeError("could not draw a route of the requested length")


def simulate_drive(
    graph: RoadGraph,
    route: list[int],
    profile: DriveProfile = DriveProfile(),
    seed: int = 0,
    params: TurnModelParams = TurnModelParams(),
    t0: float = 0.0,
    ds: float = 0.5,
    start_pad: float = 2.0,
    end_pad: float = 5.0,
) -> tuple[SpeedTrace, GpsFix]:
    """Drive ``route`` at 1 Hz and return the speed trace plus the true destination.

    Speeds follow a distance-domain profile capped by cruise speed and way
    limits, bounded by ``accel``/``decel``, slowed for turns and brought to
    rest for junction stops. Reported speeds are mean speeds over each
    one-second interval, so integrating them reproduces the route length.
    """
    if len(route) < 2:
        raise ValueError("route needs at least two nodes")
    rng = random.Random(seed)
    edges = []
    for a, b in zip(route, route[1:]):
        cands = [e for e in graph.adjacency.get(a, ()) if e.target == b]
        if not cands:
            raise ValueError(f"route not connected: {a} -> {b}")
        edges.append(min(cands, key=lambda e: e.length))

    # distance grid with an exact point at every route node
    s_parts, cap_parts, node_idx = [np.zeros(1)], [], [0]
    s0 = 0.0
    for e in edges:
        m = max(1, math.ceil(e.length / ds))
        seg = s0 + np.linspace(0.0, e.length, m + 1)[1:]
        s_parts.append(seg)
        cap_parts.append(np.full(m, min(profile.cruise_speed, graph.ways[e.way].max_speed)))
        s0 += e.length
        node_idx.append(node_idx[-1] + m)
    s = np.concatenate(s_parts)
    cap = np.concatenate([np.array([cap_parts[0][0]])] + cap_parts)
    v = cap.copy()
    v[0] = 0.0
    v[-1] = 0.0
    stops = []
    for k in range(1, len(route) - 1):
        i = node_idx[k]
        v[i] = min(v[i], cap[i + 1])
        if graph.is_intersection(route[k]) and rng.random() < profile.stop_probability_at_junction:
            v[i] = 0.0
            stops.append(i)
        else:
            td = turn_geometry(graph, route[k - 1], route[k], route[k + 1], params.lane_width,
                               edges[k - 1].way, edges[k].way)
            v[i] = min(v[i], profile.turn_speed_factor * turn_speed_limit(td, params))

    ds_arr = np.diff(s)
    for i in range(len(s) - 1):
        v[i + 1] = min(v[i + 1], math.sqrt(v[i] ** 2 + 2.0 * profile.accel * ds_arr[i]))
    for i in range(len(s) - 2, -1, -1):
        v[i] = min(v[i], math.sqrt(v[i + 1] ** 2 + 2.0 * profile.decel * ds_arr[i]))

    # time at each grid point, dwelling at stops
    t_pts, s_pts = [0.0, start_pad], [0.0, 0.0]
    t = start_pad
    stop_set = set(stops)
    for i in range(len(s) - 1):
        t += 2.0 * ds_arr[i] / (v[i] + v[i + 1])
        t_pts.append(t)
        s_pts.append(s[i + 1])
        if i + 1 in stop_set:
            t += profile.stop_duration
            t_pts.append(t)
            s_pts.append(s[i + 1])
    t_pts.append(t + end_pad)
    s_pts.append(s[-1])

    times = np.arange(0.0, math.floor(t_pts[-1]) + 1.0)
    pos = np.interp(times, np.array(t_pts), np.array(s_pts))
    speeds = np.zeros_like(pos)
    speeds[1:] = np.diff(pos) / np.diff(times)
    trace = SpeedTrace.from_arrays(times + t0, np.maximum(speeds, 0.0), Source.SPEEDOMETER)
    end = graph.nodes[route[-1]]
    return trace, GpsFix(t0 + float(times[-1]), end.lat, end.lon)


def to_osm_xml(graph: RoadGraph) -> str:
    """Serialize ``graph`` as OSM XML that :func:`~elasticpath.mapgraph.parse_osm` reads back."""
    from xml.sax.saxutils import quoteattr

    lines = ['<?xml version="1.0" encoding="UTF-8"?>', '<osm version="0.6" generator="elasticpath">']
    for n in sorted(graph.nodes.values(), key=lambda n: n.id):
        lines.append(f'  <node id="{n.id}" lat="{n.lat!r}" lon="{n.lon!r}"/>')
    for w in sorted(graph.ways.values(), key=lambda w: w.id):
        lines.append(f'  <way id="{w.id}">')
        lines.extend(f'    <nd ref="{r}"/>' for r in w.node_sequence)
        tags = {"highway": w.highway_class, "maxspeed": w.maxspeed_tag or f"{w.max_speed / MPH:.6f} mph"}
        if w.one_way:
            tags["oneway"] = "yes"
        if w.lanes > 1:
            tags["lanes"] = str(w.lanes if w.one_way else 2 * w.lanes)
        lines.extend(f'    <tag k="{k}" v={quoteattr(v)}/>' for k, v in tags.items())
        lines.append("  </way>")
    lines.append("</osm>")
    return "\n".join(lines) + "\n"
