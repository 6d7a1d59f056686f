import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from elasticpath.geo import offset_latlon  # noqa: E402
from elasticpath.mapgraph import RoadGraph, RoadNode, RoadWay  # noqa: E402

ORIGIN = (40.5, -74.45)


def osm_doc(nodes, ways) -> bytes:
    """nodes: {id: (lat, lon)}; ways: [(id, [refs], {tags})]."""
    out = ['<?xml version="1.0"?>', '<osm version="0.6">']
    for nid, (lat, lon) in nodes.items():
        out.append(f'<node id="{nid}" lat="{lat}" lon="{lon}"/>')
    for wid, refs, tags in ways:
        out.append(f'<way id="{wid}">')
        out += [f'<nd ref="{r}"/>' for r in refs]
        out += [f'<tag k="{k}" v="{v}"/>' for k, v in tags.items()]
        out.append("</way>")
    out.append("</osm>")
    return "\n".join(out).encode()


def planar_graph(points, segments, limit=11.18, lanes=1, one_way=()):
    """Graph from local east/north meter coordinates; each segment is its own way.

    ``limit`` is one speed for every way or a list with one per segment.
    """
    nodes = [RoadNode(nid, *offset_latlon(*ORIGIN, x, y)) for nid, (x, y) in points.items()]
    limits = limit if isinstance(limit, (list, tuple)) else [limit] * len(segments)
    ways = []
    for k, seg in enumerate(segments):
        ways.append(RoadWay(100 + k, tuple(seg), limits[k], lanes=lanes, one_way=k in one_way))
    return RoadGraph.from_ways(nodes, ways)


def straight_road(n_segments=10, length=100.0, limit=11.18):
    pts = {i + 1: (i * length, 0.0) for i in range(n_segments + 1)}
    return planar_graph(pts, [tuple(range(1, n_segments + 2))], limit)


@pytest.fixture
def plus_junction():
    """Node 1 at the origin with arms 2 (east), 3 (north), 4 (west), 5 (south), 100 m each."""
    pts = {1: (0, 0), 2: (100, 0), 3: (0, 100), 4: (-100, 0), 5: (0, -100)}
    return planar_graph(pts, [(4, 1, 2), (5, 1, 3)])


@pytest.fixture
def right_angle():
    pts = {1: (0, 0), 2: (100, 0), 3: (100, 100)}
    return planar_graph(pts, [(1, 2), (2, 3)])


@pytest.fixture
def y_junction():
    """Arms at 0, 120 and 240 degrees around node 1."""
    pts = {1: (0, 0)}
    for k in range(3):
        a = k * 2 * math.pi / 3
        pts[k + 2] = (100 * math.cos(a), 100 * math.sin(a))
    return planar_graph(pts, [(2, 1), (3, 1), (4, 1)])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
