"""Best-first search that fits a speed trace onto road-graph walks.

A candidate's position along its walk at sample ``i`` is
``trace.odometer[i] + shift``. Reconciling the trace with a road feature
(a stop that must sit at an intersection, a turn that must be taken slowly)
changes ``shift`` and adds the size of the change to ``error``. Candidates are
expanded in order of ``(error, seq)``.
"""

from __future__ import annotations

import bisect
import heapq
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .geo import MPH, interpolate
from .kinematics import TurnModelParams, turn_speed_limit
from .mapgraph import Edge, RoadGraph, RoadWay, TurnDescriptor, neighbors, turn_geometry
from .trace import STOP_SPEED, SpeedTrace

_EPS = 1e-9


@dataclass(frozen=True)
class PathingConfig:
    delta: float = 1.1
    speed_slack: float = 20 * MPH
    rewind_window: int = 5
    max_adjust: float = 150.0
    max_partials: int = 100_000
    use_speed_limits: bool = True
    stop_speed: float = STOP_SPEED
    turn: TurnModelParams = TurnModelParams()

    def __post_init__(self):
        if not self.delta > 1:
            raise ValueError("delta must exceed 1")
        if self.speed_slack <= 0 or self.rewind_window <= 0 or self.max_adjust <= 0 or self.max_partials <= 0:
            raise ValueError("config magnitudes must be positive")

    def intersection_tolerance(self, way: RoadWay) -> float:
        return way.lanes * self.turn.lane_width + self.turn.car_offset


class Landmark(NamedTuple):
    node: int
    trace_index: int
    distance_along_path: float


@dataclass(eq=False)
class CandidatePath:
    nodes: list[int]
    dists: list[float]
    ways: list[int]
    landmarks: list[Landmark] = field(default_factory=list)
    cursor: int = 0
    shift: float = 0.0
    error: float = 0.0
    complete: bool = False
    seq: int = -1
    calc_distance: float = 0.0
    predicted_distance: float = 0.0
    final_distance: float | None = None
    edges: set = field(default_factory=set, repr=False)

    @classmethod
    def start(cls, node: int) -> CandidatePath:
        return cls([node], [0.0], [])

    def copy(self) -> CandidatePath:
        return CandidatePath(
            list(self.nodes), list(self.dists), list(self.ways), list(self.landmarks),
            self.cursor, self.shift, self.error, self.complete, self.seq,
            self.calc_distance, self.predicted_distance, self.final_distance, set(self.edges),
        )

    @property
    def length(self) -> float:
        return self.dists[-1]

    def end_point(self, graph: RoadGraph) -> tuple[float, float]:
        """(lat, lon) of the estimated position at the end of the trace."""
        s = self.final_distance if self.final_distance is not None else self.dists[-1]
        return point_along(graph, self.nodes, self.dists, s)


def point_along(graph: RoadGraph, nodes: list[int], dists: list[float], s: float) -> tuple[float, float]:
    if len(nodes) == 1 or s <= 0:
        n = graph.nodes[nodes[0]]
        return n.lat, n.lon
    for k in range(1, len(nodes)):
        if s <= dists[k] or k == len(nodes) - 1:
            a, b = graph.nodes[nodes[k - 1]], graph.nodes[nodes[k]]
            seg = dists[k] - dists[k - 1]
            frac = 1.0 if seg <= 0 else min(1.0, (s - dists[k - 1]) / seg)
            return interpolate(a.lat, a.lon, b.lat, b.lon, frac)
    raise AssertionError("unreachable")


@dataclass
class PathingOutcome:
    completes: list[CandidatePath]
    explored_count: int
    truncated: bool = False

    @property
    def best(self) -> CandidatePath | None:
        return self.completes[0] if self.completes else None


class _Prepared(NamedTuple):
    od: list[float]
    v: list[float]
    next_moving: list[int]


def _prepare(trace: SpeedTrace, stop_speed: float) -> _Prepared:
    key = f"_prepared_{stop_speed!r}"
    cached = trace.__dict__.get(key)
    if cached is None:
        v = trace.speeds.tolist()
        n = len(v)
        nxt = [n] * (n + 1)
        for i in range(n - 1, -1, -1):
            nxt[i] = i if v[i] >= stop_speed else nxt[i + 1]
        cached = _Prepared(trace.odometer.tolist(), v, nxt)
        trace.__dict__[key] = cached
    return cached


def within_speed_limit(v: float, way: RoadWay, slack: float) -> bool:
    return v <= way.max_speed + slack


def pin(path: CandidatePath, node: int, trace_index: int | None = None, distance: float | None = None) -> CandidatePath:
    """Lock ``node`` to a trace sample. A second pin at an already pinned sample is ignored."""
    idx = path.cursor if trace_index is None else trace_index
    if path.landmarks and idx <= path.landmarks[-1].trace_index:
        return path
    if distance is None:
        k = len(path.nodes) - 1 - path.nodes[::-1].index(node)
        distance = path.dists[k]
    path.landmarks.append(Landmark(node, idx, distance))
    return path


def _extend(path: CandidatePath, e: Edge) -> None:
    path.edges.add((path.nodes[-1], e.target))
    path.nodes.append(e.target)
    path.dists.append(path.dists[-1] + e.length)
    path.ways.append(e.way)


def _sync(path: CandidatePath, prep: _Prepared) -> CandidatePath:
    k = min(path.cursor, len(prep.od) - 1)
    lm = path.landmarks[-1]
    path.calc_distance = prep.od[k] - prep.od[lm.trace_index]
    path.predicted_distance = prep.od[k] + path.shift - lm.distance_along_path
    return path


def _turn(graph: RoadGraph, path: CandidatePath, e: Edge, cfg: PathingConfig) -> tuple[TurnDescriptor, float]:
    prev, node, entry = path.nodes[-2], path.nodes[-1], path.ways[-1]
    key = ("turn", prev, node, e.target, entry, e.way, cfg.turn)
    hit = graph._cache.get(key)
    if hit is None:
        td = turn_geometry(graph, prev, node, e.target, cfg.turn.lane_width, entry, e.way)
        hit = (td, turn_speed_limit(td, cfg.turn))
        graph._cache[key] = hit
    return hit


def _continuations(graph: RoadGraph, path: CandidatePath) -> list[Edge]:
    node = path.nodes[-1]
    prev = path.nodes[-2] if len(path.nodes) > 1 else None
    return [e for e in neighbors(graph, node, prev) if (node, e.target) not in path.edges]


def _finish(path: CandidatePath, prep: _Prepared) -> CandidatePath:
    n = len(prep.od)
    path.cursor = n
    path.complete = True
    path.final_distance = min(path.dists[-1], max(0.0, prep.od[n - 1] + path.shift))
    return _sync(path, prep)


def _variant_turn(path: CandidatePath, prep: _Prepared, j: int, turn: TurnDescriptor) -> CandidatePath:
    b = path.copy()
    L = b.dists[-1]
    d = abs(L - (prep.od[j] + b.shift))
    b.shift = L - prep.od[j]
    b.error += d
    b.cursor = j
    pin(b, turn.at_node, j, L)
    _extend(b, Edge(turn.next_node, turn.exit_way, turn.exit_length))
    return b


def reconcile_turn(path: CandidatePath, trace: SpeedTrace, turn: TurnDescriptor, cfg: PathingConfig) -> list[CandidatePath]:
    """Rewind (compress) or advance (stretch) the cursor to a sample slow enough for ``turn``."""
    prep = _prepare(trace, cfg.stop_speed)
    vmax = turn_speed_limit(turn, cfg.turn)
    i, n = path.cursor, len(prep.v)
    L = path.dists[-1]
    out = []
    lo = max(path.landmarks[-1].trace_index + 1, i - cfg.rewind_window)
    for j in range(i - 1, lo - 1, -1):
        if prep.v[j] <= vmax:
            if abs(L - (prep.od[j] + path.shift)) <= cfg.max_adjust:
                out.append(_variant_turn(path, prep, j, turn))
            break
    for j in range(i + 1, min(n - 1, i + cfg.rewind_window) + 1):
        if prep.v[j] <= vmax:
            if abs(prep.od[j] + path.shift - L) <= cfg.max_adjust:
                out.append(_variant_turn(path, prep, j, turn))
            break
    return [_sync(b, prep) for b in out]


def _stop_anchors(path: CandidatePath, s: float, graph: RoadGraph, cfg: PathingConfig):
    """Nearest stop-compatible node behind and ahead of position ``s``.

    Returns ``(behind, ahead)``: behind is ``(walk index, distance)``, ahead is
    ``(walk index or None, extra edges, node, distance)``; either may be
    ``None``. Behind never crosses the last landmark and may land on the trip
    origin. Ahead continues past the walk end only through nodes that offer no
    choice of direction.
    """
    nodes, dists = path.nodes, path.dists
    floor = path.landmarks[-1].distance_along_path - _EPS
    m = bisect.bisect_right(dists, s + _EPS) - 1
    behind = None
    for k in range(m, -1, -1):
        if dists[k] < floor or s - dists[k] > cfg.max_adjust:
            break
        if k == 0 or graph.is_intersection(nodes[k]):
            behind = (k, max(0.0, s - dists[k]))
            break

    ahead = None
    for k in range(m + 1, len(nodes)):
        d = dists[k] - s
        if d > cfg.max_adjust:
            return behind, None
        if graph.is_intersection(nodes[k]):
            return behind, (k, [], nodes[k], d)
    node, prev = nodes[-1], nodes[-2]
    d = dists[-1] - s
    extra: list[Edge] = []
    seen = set(path.edges)
    while True:
        conts = [e for e in neighbors(graph, node, prev) if (node, e.target) not in seen]
        if len(conts) != 1:
            break
        e = conts[0]
        d += e.length
        if d > cfg.max_adjust:
            break
        seen.add((node, e.target))
        extra.append(e)
        prev, node = node, e.target
        if graph.is_intersection(node):
            ahead = (None, extra, node, d)
            break
    return behind, ahead


def _apply_ahead(path: CandidatePath, ahead) -> tuple[int, float]:
    k, extra, node, _ = ahead
    for e in extra:
        _extend(path, e)
    if k is None:
        return node, path.dists[-1]
    return node, path.dists[k]


def reconcile_stop(path: CandidatePath, trace: SpeedTrace, graph: RoadGraph, cfg: PathingConfig) -> list[CandidatePath]:
    """Move a stop that is not at an intersection back (compress) or forward (stretch) to one.

    The stop is the sample just before ``path.cursor``; the cursor itself does not move.
    """
    prep = _prepare(trace, cfg.stop_speed)
    idx = path.cursor - 1
    s = prep.od[idx] + path.shift
    behind, ahead = _stop_anchors(path, s, graph, cfg)
    out = []
    if behind is not None:
        k, d = behind
        b = path.copy()
        b.shift -= d
        b.error += d
        pin(b, b.nodes[k], idx, b.dists[k])
        out.append(b)
    if ahead is not None:
        d = ahead[3]
        b = path.copy()
        node, dist = _apply_ahead(b, ahead)
        b.shift += d
        b.error += d
        pin(b, node, idx, dist)
        out.append(b)
    return [_sync(b, prep) for b in out]


def _handle_stop(path, prep, trace, graph, cfg, i):
    n = len(prep.v)
    c = prep.next_moving[i]
    if c >= n:
        return [_finish(path, prep)]
    path.cursor = c
    if i <= 1:
        # standing at the origin before departure
        pin(path, path.nodes[0], c - 1, 0.0)
        return None
    s = prep.od[c - 1] + path.shift
    behind, ahead = _stop_anchors(path, s, graph, cfg)
    tol = cfg.intersection_tolerance(graph.ways[path.ways[-1]])
    best = None
    if behind is not None and behind[1] <= tol:
        best = ("b", behind[1])
    if ahead is not None and ahead[3] <= tol and (best is None or ahead[3] < best[1]):
        best = ("a", ahead[3])
    if best is None:
        return reconcile_stop(path, trace, graph, cfg)
    if best[0] == "b":
        k = behind[0]
        pin(path, path.nodes[k], c - 1, path.dists[k])
    else:
        node, dist = _apply_ahead(path, ahead)
        pin(path, node, c - 1, dist)
    return [_sync(path, prep)]


def _handle_node(path, prep, trace, graph, cfg, i):
    conts = _continuations(graph, path)
    if not conts:
        return []
    speed = prep.v[i]
    if len(conts) == 1:
        turn, vmax = _turn(graph, path, conts[0], cfg)
        if speed <= vmax:
            _extend(path, conts[0])
            return None
        return reconcile_turn(path, trace, turn, cfg)
    out = []
    node = path.nodes[-1]
    for e in conts:
        turn, vmax = _turn(graph, path, e, cfg)
        if speed <= vmax:
            b = path.copy()
            pin(b, node)
            _extend(b, e)
            out.append(_sync(b, prep))
        else:
            out.extend(reconcile_turn(path, trace, turn, cfg))
    return out


def goto_branch(path: CandidatePath, trace: SpeedTrace, graph: RoadGraph, cfg: PathingConfig) -> list[CandidatePath]:
    """Advance ``path`` to its next feature and return the resulting branches.

    ``path`` is advanced in place and may itself be one of the returned paths.
    An empty list means the candidate is no longer feasible.
    """
    prep = _prepare(trace, cfg.stop_speed)
    od, v = prep.od, prep.v
    n = len(v)
    while True:
        i = path.cursor
        if i >= n:
            return [_finish(path, prep)]
        if len(path.nodes) == 1:
            out = []
            for e in _continuations(graph, path):
                b = path.copy()
                _extend(b, e)
                out.append(_sync(b, prep))
            return out
        if od[i] + path.shift > path.dists[-1] + _EPS:
            out = _handle_node(path, prep, trace, graph, cfg, i)
            if out is None:
                continue
            return out
        if v[i] < cfg.stop_speed:
            out = _handle_stop(path, prep, trace, graph, cfg, i)
            if out is None:
                continue
            return out
        if cfg.use_speed_limits and not within_speed_limit(v[i], graph.ways[path.ways[-1]], cfg.speed_slack):
            return []
        path.cursor = i + 1


def elastic_pathing(graph: RoadGraph, start: int, trace: SpeedTrace, cfg: PathingConfig = PathingConfig()) -> PathingOutcome:
    """Rank walks from ``start`` by how little the trace must be stretched to fit them.

    Returns every complete candidate whose error is within ``cfg.delta`` of the
    best one, best first.
    """
    if start not in graph.adjacency:
        raise KeyError(f"start node {start} not in graph")
    if len(trace) == 0:
        raise ValueError("empty trace")
    root = pin(CandidatePath.start(start), start)
    root.seq = 0
    heap: list[tuple[float, int, CandidatePath]] = [(0.0, 0, root)]
    seq = 1
    explored = 1
    truncated = False
    completes: list[CandidatePath] = []
    best = math.inf
    slack_cap = cfg.max_partials + max(1, cfg.max_partials // 8)
    while heap and (not completes or heap[0][0] < cfg.delta * best):
        _, _, cur = heapq.heappop(heap)
        for p in goto_branch(cur, trace, graph, cfg):
            p.seq = seq
            seq += 1
            if p is not cur:
                explored += 1
            if p.complete:
                completes.append(p)
                best = min(best, p.error)
            else:
                heapq.heappush(heap, (p.error, p.seq, p))
        if len(heap) > slack_cap:
            heap = heapq.nsmallest(cfg.max_partials, heap)
            heapq.heapify(heap)
            truncated = True
    completes.sort(key=lambda p: (p.error, p.seq))
    if completes:
        top = completes[0].error
        completes = [completes[0]] + [p for p in completes[1:] if p.error < cfg.delta * top]
    return PathingOutcome(completes, explored, truncated)
