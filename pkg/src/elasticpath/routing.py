"""Optional rerank of top candidates by agreement with the shortest route."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .engine import CandidatePath, PathingOutcome
from .geo import haversine_m
from .mapgraph import RoadGraph


@dataclass(frozen=True)
class RoutingScoreParams:
    beta: float = 0.5
    omega: float = 0.5
    top_k: int = 10

    def __post_init__(self):
        if not (0.0 <= self.beta <= 1.0 and 0.0 <= self.omega <= 1.0):
            raise ValueError("beta and omega must lie in [0, 1]")
        if abs(self.beta + self.omega - 1.0) > 1e-12:
            raise ValueError("beta + omega must equal 1")

    @classmethod
    def with_beta(cls, beta: float, top_k: int = 10) -> RoutingScoreParams:
        return cls(beta, 1.0 - beta, top_k)


@dataclass
class ScoredCandidate:
    path: CandidatePath
    calc_dist: float
    routing_dist: float | None
    comb_score: float


def shortest_route(graph: RoadGraph, src: int, dst: int) -> tuple[list[int], float] | None:
    """A* over segment lengths with a great-circle heuristic; ``None`` if unreachable."""
    if src not in graph.nodes or dst not in graph.nodes:
        raise KeyError(f"unknown node {src if src not in graph.nodes else dst}")
    if src == dst:
        return [], 0.0
    goal = graph.nodes[dst]

    def h(n: int) -> float:
        p = graph.nodes[n]
        # shaved so float noise in haversine never overestimates an edge sum
        return haversine_m(p.lat, p.lon, goal.lat, goal.lon) * (1.0 - 1e-9)

    g = {src: 0.0}
    parent: dict[int, int] = {}
    done = set()
    queue = [(h(src), 0.0, src)]
    while queue:
        _, d, node = heapq.heappop(queue)
        if node in done:
            continue
        if node == dst:
            route = [node]
            while route[-1] != src:
                route.append(parent[route[-1]])
            route.reverse()
            return route, d
        done.add(node)
        for e in graph.adjacency.get(node, ()):
            nd = d + e.length
            if nd < g.get(e.target, math.inf):
                g[e.target] = nd
                parent[e.target] = node
                heapq.heappush(queue, (nd + h(e.target), nd, e.target))
    return None


def combined_score(
    error: float,
    max_error: float,
    calc_dist: float,
    routing_dist: float | None,
    p: RoutingScoreParams = RoutingScoreParams(),
) -> float:
    if calc_dist <= 0:
        raise ValueError("calc_dist must be positive")
    fit = 1.0 if max_error <= 0 else (max_error - error) / max_error
    if routing_dist is None:
        return fit
    if routing_dist < calc_dist:
        return p.beta * fit + p.omega * routing_dist / calc_dist
    rd = min(routing_dist, 2.0 * calc_dist)
    ratio2 = 1.0 - (rd - calc_dist) / calc_dist
    return p.beta * fit + p.omega * ratio2


def route_distance_to_end(graph: RoadGraph, start: int, path: CandidatePath) -> float | None:
    """Shortest driving distance from ``start`` to where ``path`` ends.

    The end usually lies inside an edge, so both of that edge's endpoints are
    tried as the approach.
    """
    s = path.final_distance if path.final_distance is not None else path.dists[-1]
    if len(path.nodes) == 1:
        return 0.0
    k = 1
    while k < len(path.nodes) - 1 and path.dists[k] < s:
        k += 1
    u, v = path.nodes[k - 1], path.nodes[k]
    into = s - path.dists[k - 1]
    remaining = path.dists[k] - s
    best = None
    r = shortest_route(graph, start, u)
    if r is not None:
        best = r[1] + into
    if any(e.target == u for e in graph.adjacency.get(v, ())):
        r = shortest_route(graph, start, v)
        if r is not None and (best is None or r[1] + remaining < best):
            best = r[1] + remaining
    return best


def rerank_top_k(
    outcome: PathingOutcome,
    graph: RoadGraph,
    start: int,
    calc_dist: float,
    p: RoutingScoreParams = RoutingScoreParams(),
) -> list[ScoredCandidate]:
    top = outcome.completes[: p.top_k]
    if not top:
        return []
    max_error = max(c.error for c in top)
    scored = []
    for c in top:
        rd = route_distance_to_end(graph, start, c)
        scored.append(ScoredCandidate(c, calc_dist, rd, combined_score(c.error, max_error, calc_dist, rd, p)))
    # stable sort keeps the engine's order among equal scores
    scored.sort(key=lambda s: -s.comb_score)
    return scored
