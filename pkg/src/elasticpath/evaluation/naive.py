"""Baseline: integrate the distance and pick directions uniformly at random."""

from __future__ import annotations

import random

from ..engine import CandidatePath, pin
from ..mapgraph import RoadGraph, neighbors
from ..trace import SpeedTrace


def naive_guess(graph: RoadGraph, start: int, trace: SpeedTrace, seed: int | None = 0) -> CandidatePath:
    if start not in graph.adjacency:
        raise KeyError(f"start node {start} not in graph")
    rng = random.Random(seed)
    total = trace.total_distance
    path = pin(CandidatePath.start(start), start)
    while path.dists[-1] < total:
        prev = path.nodes[-2] if len(path.nodes) > 1 else None
        options = neighbors(graph, path.nodes[-1], prev)
        if not options:
            break
        e = options[rng.randrange(len(options))]
        path.edges.add((path.nodes[-1], e.target))
        path.nodes.append(e.target)
        path.dists.append(path.dists[-1] + e.length)
        path.ways.append(e.way)
    path.cursor = len(trace)
    path.complete = True
    path.final_distance = min(total, path.dists[-1])
    path.calc_distance = total
    path.predicted_distance = path.final_distance
    return path
