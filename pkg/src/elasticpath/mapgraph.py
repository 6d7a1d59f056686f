"""Road graph built from OpenStreetMap XML.

The graph is immutable once built. All lengths are meters and all speeds are
meters per second; OSM ``maxspeed`` strings are converted at parse time.
"""

from __future__ import annotations

import logging
import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, NamedTuple

from .geo import KMH, KNOT, MPH, haversine_m, local_xy

log = logging.getLogger(__name__)

DEFAULT_LANE_WIDTH = 3.65

DRIVABLE_HIGHWAYS = frozenset(
    {
        "motorway", "trunk", "primary", "secondary", "tertiary", "unclassified",
        "residential", "service", "motorway_link", "trunk_link", "primary_link",
        "secondary_link", "tertiary_link", "living_street",
    }
)

DEFAULT_MAX_SPEED = {
    "motorway": 29.06,
    "trunk": 24.59,
    "primary": 20.12,
    "secondary": 17.88,
    "tertiary": 15.65,
    "residential": 11.18,
    "unclassified": 11.18,
    "living_street": 11.18,
    "service": 11.18,
}
# *_link ways inherit the parent class limit
_FALLBACK_SPEED = 11.18

_TRUE_TAGS = {"yes", "true", "1"}


class OsmParseError(ValueError):
    """Raised for malformed OSM XML; carries the parser's line and column."""

    def __init__(self, message: str, line: int | None = None, offset: int | None = None):
        super().__init__(f"{message} (line {line}, offset {offset})")
        self.line = line
        self.offset = offset


@dataclass(frozen=True)
class RoadNode:
    id: int
    lat: float
    lon: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0 and -180.0 <= self.lon <= 180.0):
            raise ValueError(f"node {self.id}: coordinates out of range ({self.lat}, {self.lon})")


@dataclass(frozen=True)
class RoadWay:
    id: int
    node_sequence: tuple[int, ...]
    max_speed: float
    lanes: int = 1
    one_way: bool = False
    highway_class: str = "residential"
    maxspeed_tag: str | None = None

    def __post_init__(self):
        if len(self.node_sequence) < 2:
            raise ValueError(f"way {self.id}: needs at least two nodes")
        if any(a == b for a, b in zip(self.node_sequence, self.node_sequence[1:])):
            raise ValueError(f"way {self.id}: repeated consecutive node")
        if self.max_speed <= 0 or self.lanes < 1:
            raise ValueError(f"way {self.id}: max_speed and lanes must be positive")


class Edge(NamedTuple):
    target: int
    way: int
    length: float


@dataclass(frozen=True)
class DrivabilityPolicy:
    """Which OSM ways are kept as drivable road."""

    highways: frozenset[str] = DRIVABLE_HIGHWAYS
    excluded_access: frozenset[str] = frozenset({"private", "no"})

    def accepts(self, tags: dict[str, str]) -> bool:
        hw = tags.get("highway")
        if hw is None or hw not in self.highways:
            return False
        if tags.get("access") in self.excluded_access:
            return False
        if "railway" in tags or tags.get("area") in _TRUE_TAGS:
            return False
        return True


@dataclass(frozen=True, eq=False)
class RoadGraph:
    nodes: dict[int, RoadNode]
    ways: dict[int, RoadWay]
    adjacency: dict[int, tuple[Edge, ...]]
    metadata: dict = field(default_factory=dict)
    # memo for derived per-turn quantities; filled lazily, never changes graph data
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_ways(cls, nodes: Iterable[RoadNode], ways: Iterable[RoadWay], metadata: dict | None = None) -> RoadGraph:
        node_map = {n.id: n for n in nodes}
        way_map: dict[int, RoadWay] = {}
        adj: dict[int, list[Edge]] = {}
        for w in ways:
            if w.id in way_map:
                raise ValueError(f"duplicate way id {w.id}")
            way_map[w.id] = w
            for a, b in zip(w.node_sequence, w.node_sequence[1:]):
                na, nb = node_map[a], node_map[b]
                length = haversine_m(na.lat, na.lon, nb.lat, nb.lon)
                adj.setdefault(a, []).append(Edge(b, w.id, length))
                adj.setdefault(b, [])
                if not w.one_way:
                    adj[b].append(Edge(a, w.id, length))
        used = set(adj)
        node_map = {k: v for k, v in node_map.items() if k in used}
        adjacency = {k: tuple(v) for k, v in adj.items()}
        return cls(node_map, way_map, adjacency, dict(metadata or {}))

    def __contains__(self, node_id: int) -> bool:
        return node_id in self.nodes

    def edge(self, a: int, b: int, way: int | None = None) -> Edge:
        for e in self.adjacency[a]:
            if e.target == b and (way is None or e.way == way):
                return e
        raise KeyError(f"no edge {a} -> {b}")

    def degree(self, node_id: int) -> int:
        """Number of distinct neighbouring nodes, ignoring direction."""
        key = ("deg", node_id)
        deg = self._cache.get(key)
        if deg is None:
            undirected = self._cache.get("undirected")
            if undirected is None:
                undirected = {}
                for a, edges in self.adjacency.items():
                    for e in edges:
                        undirected.setdefault(a, set()).add(e.target)
                        undirected.setdefault(e.target, set()).add(a)
                self._cache["undirected"] = undirected
            deg = len(undirected.get(node_id, ()))
            self._cache[key] = deg
        return deg

    def is_intersection(self, node_id: int) -> bool:
        return self.degree(node_id) >= 3

    def nearest_node(self, lat: float, lon: float, max_distance: float = 100.0) -> int:
        """Snap a coordinate to the closest graph node within ``max_distance`` meters."""
        best, best_d = None, math.inf
        for n in self.nodes.values():
            d = haversine_m(lat, lon, n.lat, n.lon)
            if d < best_d:
                best, best_d = n.id, d
        if best is None or best_d > max_distance:
            raise ValueError(f"no graph node within {max_distance} m of ({lat}, {lon})")
        return best


def parse_maxspeed(tag: str | None) -> float | None:
    """Convert an OSM maxspeed value to m/s; ``None`` when absent or unusable."""
    if tag is None:
        return None
    first = tag.split(";")[0].strip().lower()
    m = re.fullmatch(r"([0-9]+(?:\.[0-9]+)?)\s*(mph|km/h|kmh|kph|knots)?", first)
    if not m:
        return None
    value = float(m.group(1))
    if value <= 0:
        return None
    unit = m.group(2)
    if unit == "mph":
        return value * MPH
    if unit == "knots":
        return value * KNOT
    return value * KMH


def default_max_speed(highway_class: str) -> float:
    base = highway_class.removesuffix("_link")
    return DEFAULT_MAX_SPEED.get(base, _FALLBACK_SPEED)


def effective_max_speed(way: RoadWay) -> float:
    """Tagged speed limit in m/s, or the highway-class default when untagged."""
    tagged = parse_maxspeed(way.maxspeed_tag)
    return tagged if tagged is not None else default_max_speed(way.highway_class)


def _lanes_per_direction(tags: dict[str, str], one_way: bool) -> int:
    try:
        total = int(float(tags["lanes"].split(";")[0]))
    except (KeyError, ValueError):
        return 1
    if total < 1:
        return 1
    return total if one_way else max(1, total // 2)


def parse_osm(document: BinaryIO | str | Path | bytes, policy: DrivabilityPolicy | None = None) -> RoadGraph:
    """Build a :class:`RoadGraph` from an OSM XML document.

    ``document`` may be a path, raw bytes or a binary file object. Ways whose
    tags fail ``policy`` are skipped; ways that reference nodes missing from
    the document are dropped and counted in ``graph.metadata``.
    """
    policy = policy or DrivabilityPolicy()
    if isinstance(document, bytes):
        import io

        document = io.BytesIO(document)
    raw_nodes: dict[int, tuple[float, float]] = {}
    raw_ways: list[tuple[int, list[int], dict[str, str]]] = []
    try:
        for _, elem in ET.iterparse(document, events=("end",)):
            if elem.tag == "node":
                raw_nodes[int(elem.attrib["id"])] = (float(elem.attrib["lat"]), float(elem.attrib["lon"]))
                elem.clear()
            elif elem.tag == "way":
                refs = [int(nd.attrib["ref"]) for nd in elem.iter("nd")]
                tags = {t.attrib["k"]: t.attrib["v"] for t in elem.iter("tag")}
                raw_ways.append((int(elem.attrib["id"]), refs, tags))
                elem.clear()
    except ET.ParseError as exc:
        line, col = exc.position
        raise OsmParseError(f"malformed OSM XML: {exc}", line, col) from exc

    dropped_missing = 0
    excluded = 0
    ways: list[RoadWay] = []
    for wid, refs, tags in raw_ways:
        if not policy.accepts(tags):
            excluded += 1
            continue
        if any(r not in raw_nodes for r in refs):
            dropped_missing += 1
            continue
        seq = [r for i, r in enumerate(refs) if i == 0 or r != refs[i - 1]]
        if len(seq) < 2:
            continue
        hw = tags["highway"]
        oneway_tag = tags.get("oneway", "").lower()
        one_way = (
            oneway_tag in _TRUE_TAGS
            or oneway_tag == "-1"
            or (oneway_tag == "" and (hw == "motorway" or tags.get("junction") == "roundabout"))
        )
        if oneway_tag == "-1":
            seq.reverse()
        probe = RoadWay(wid, tuple(seq), 1.0, highway_class=hw, maxspeed_tag=tags.get("maxspeed"))
        ways.append(
            RoadWay(
                wid,
                tuple(seq),
                effective_max_speed(probe),
                lanes=_lanes_per_direction(tags, one_way),
                one_way=one_way,
                highway_class=hw,
                maxspeed_tag=tags.get("maxspeed"),
            )
        )
    if dropped_missing:
        log.warning("dropped %d ways referencing missing nodes", dropped_missing)
    nodes = [RoadNode(nid, lat, lon) for nid, (lat, lon) in raw_nodes.items()]
    meta = {"dropped_ways_missing_nodes": dropped_missing, "excluded_ways": excluded}
    return RoadGraph.from_ways(nodes, ways, meta)


def load_osm(path: str | Path, policy: DrivabilityPolicy | None = None) -> RoadGraph:
    with open(path, "rb") as fh:
        return parse_osm(fh, policy)


def neighbors(graph: RoadGraph, at: int, arrived_from: int | None = None) -> list[Edge]:
    """Outgoing edges of ``at``, without the immediate back-edge to ``arrived_from``."""
    try:
        edges = graph.adjacency[at]
    except KeyError:
        raise KeyError(f"unknown node {at}") from None
    if arrived_from is None:
        return list(edges)
    return [e for e in edges if e.target != arrived_from]


@dataclass(frozen=True)
class TurnDescriptor:
    """Geometry of moving ``prev_node -> at_node -> next_node``.

    ``alpha`` is the interior angle at the junction: pi for a straight
    continuation, pi/2 for a right-angle turn. ``deflection`` is the heading
    change, which is what the turn-radius model consumes.
    """

    alpha: float
    entry_width_x: float
    exit_width_y: float
    at_node: int
    prev_node: int | None = None
    next_node: int | None = None
    exit_way: int | None = None
    exit_length: float = 0.0

    @property
    def deflection(self) -> float:
        return math.pi - self.alpha


def turn_geometry(
    graph: RoadGraph,
    prev: int,
    junction: int,
    next: int,
    lane_width: float = DEFAULT_LANE_WIDTH,
    entry_way: int | None = None,
    exit_way: int | None = None,
) -> TurnDescriptor:
    e_in = graph.edge(prev, junction, entry_way)
    e_out = graph.edge(junction, next, exit_way)
    j = graph.nodes[junction]
    p, n = graph.nodes[prev], graph.nodes[next]
    ax, ay = local_xy(p.lat, p.lon, j.lat, j.lon)
    bx, by = local_xy(n.lat, n.lon, j.lat, j.lon)
    alpha = math.atan2(abs(ax * by - ay * bx), ax * bx + ay * by)
    if alpha > math.pi - 1e-9:
        alpha = math.pi
    return TurnDescriptor(
        alpha=alpha,
        entry_width_x=graph.ways[e_in.way].lanes * lane_width,
        exit_width_y=graph.ways[e_out.way].lanes * lane_width,
        at_node=junction,
        prev_node=prev,
        next_node=next,
        exit_way=e_out.way,
        exit_length=e_out.length,
    )


@dataclass(frozen=True)
class PathCount:
    start_node: int
    radius_m: float
    path_count: int
    capped: bool

    def to_json(self) -> dict:
        return {"start_node": self.start_node, "radius_m": self.radius_m,
                "path_count": self.path_count, "capped": self.capped}


def count_paths_within_distance(graph: RoadGraph, start: int, radius: float, cap: int = 10**7) -> PathCount:
    """Count maximal simple paths from ``start`` bounded by ``radius``.

    A path stops growing once its length reaches ``radius`` or when every
    continuation would revisit a node (dead ends included). Each such
    terminal path counts once.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if start not in graph.adjacency:
        raise KeyError(f"unknown node {start}")
    count = 0
    on_path = {start}
    # explicit stack of (node, length so far, iterator over edges)
    stack = [(start, 0.0, iter(graph.adjacency[start]))]
    extended = [False]
    while stack:
        node, dist, it = stack[-1]
        for e in it:
            if e.target in on_path:
                continue
            extended[-1] = True
            nd = dist + e.length
            if nd >= radius:
                count += 1
                if count >= cap:
                    return PathCount(start, radius, cap, True)
                continue
            on_path.add(e.target)
            stack.append((e.target, nd, iter(graph.adjacency[e.target])))
            extended.append(False)
            break
        else:
            stack.pop()
            if not extended.pop() and node != start:
                count += 1
                if count >= cap:
                    return PathCount(start, radius, cap, True)
            on_path.discard(node)
    return PathCount(start, radius, count, False)
