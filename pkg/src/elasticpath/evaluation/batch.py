"""Trace evaluation: single traces, parallel batches and the synthetic benchmark."""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ..engine import PathingConfig, elastic_pathing
from ..mapgraph import RoadGraph
from ..routing import RoutingScoreParams, rerank_top_k
from ..trace import GpsFix, SpeedTrace
from .metrics import EvalRecord, Method, bin_report, destination_error, within_rate
from .naive import naive_guess
from .synth import DriveProfile, make_grid_map, random_route, simulate_drive


@dataclass(frozen=True)
class EvalJob:
    trace_id: str
    start: int
    trace: SpeedTrace
    truth: GpsFix | None = None
    method: Method = Method.ELASTIC
    seed: int = 0


def evaluate(
    graph: RoadGraph,
    job: EvalJob,
    cfg: PathingConfig = PathingConfig(),
    routing: RoutingScoreParams = RoutingScoreParams(),
) -> EvalRecord:
    """Estimate one trace's destination with ``job.method`` and score it against the truth."""
    t0 = time.perf_counter()
    end_t = job.trace.samples[-1].t
    if job.method is Method.NAIVE:
        path, explored = naive_guess(graph, job.start, job.trace, job.seed), 1
    else:
        out = elastic_pathing(graph, job.start, job.trace, cfg)
        explored = out.explored_count
        path = out.best
        if path is not None and job.method is Method.ELASTIC_ROUTING:
            ranked = rerank_top_k(out, graph, job.start, job.trace.total_distance or 1.0, routing)
            path = ranked[0].path
    runtime = time.perf_counter() - t0
    est = None if path is None else GpsFix(end_t, *path.end_point(graph))
    err = None if est is None or job.truth is None else destination_error(est, job.truth)
    return EvalRecord(job.trace_id, job.truth, est, err, runtime, explored, job.method)


_WORKER_STATE: dict = {}


def _init_worker(graph, cfg, routing):
    _WORKER_STATE.update(graph=graph, cfg=cfg, routing=routing)


def _run_one(job: EvalJob) -> EvalRecord:
    s = _WORKER_STATE
    return evaluate(s["graph"], job, s["cfg"], s["routing"])


def run_batch(
    graph: RoadGraph,
    jobs: list[EvalJob],
    cfg: PathingConfig = PathingConfig(),
    routing: RoutingScoreParams = RoutingScoreParams(),
    workers: int = 1,
) -> list[EvalRecord]:
    """Evaluate ``jobs``; records come back in input order whatever the worker count."""
    if workers <= 1 or len(jobs) <= 1:
        return [evaluate(graph, j, cfg, routing) for j in jobs]
    with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(graph, cfg, routing)) as pool:
        return list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


@dataclass
class SyntheticTrip:
    trace_id: str
    route: list[int]
    trace: SpeedTrace
    truth: GpsFix


def synthetic_trips(
    graph: RoadGraph,
    trips: int,
    seed: int = 0,
    profile: DriveProfile = DriveProfile(),
    min_length: float = 1500.0,
) -> list[SyntheticTrip]:
    rng = random.Random(seed)
    out = []
    for k in range(trips):
        route = random_route(graph, rng, min_length)
        trace, truth = simulate_drive(graph, route, profile, seed=rng.randrange(2**31))
        out.append(SyntheticTrip(f"trip{k:04d}", route, trace, truth))
    return out


@dataclass
class SyntheticReport:
    records: list[EvalRecord]
    naive_runs: list[list[EvalRecord]] = field(default_factory=list)

    def naive_within(self, meters: float) -> dict:
        rates = [within_rate(r, meters) for r in self.naive_runs]
        if not rates:
            return {"min": None, "avg": None, "max": None}
        return {"min": min(rates), "avg": sum(rates) / len(rates), "max": max(rates)}

    def to_json(self) -> dict:
        doc = {"records": [r.to_json() for r in self.records]}
        if self.records:
            doc["histogram"] = bin_report(self.records).to_json()
            doc["within_250m"] = within_rate(self.records, 250.0)
        if self.naive_runs:
            doc["naive"] = {
                "repeats": len(self.naive_runs),
                "within_250m": self.naive_within(250.0),
                "histograms": [bin_report(r).to_json() for r in self.naive_runs],
                "records": [[x.to_json() for x in r] for r in self.naive_runs],
            }
        return doc


def run_synthetic(
    n: int = 10,
    spacing: float = 150.0,
    trips: int = 50,
    seed: int = 0,
    repeats: int = 10,
    profile: DriveProfile = DriveProfile(),
    cfg: PathingConfig = PathingConfig(),
    jitter: float = 0.2,
    min_length: float = 1500.0,
    workers: int = 1,
    method: Method = Method.ELASTIC,
) -> SyntheticReport:
    """Grid benchmark: elastic pathing against ``repeats`` runs of naive guessing."""
    graph = make_grid_map(n, spacing, jitter=jitter, seed=seed)
    sims = synthetic_trips(graph, trips, seed, profile, min_length)
    jobs = [EvalJob(s.trace_id, s.route[0], s.trace, s.truth, method) for s in sims]
    records = run_batch(graph, jobs, cfg, workers=workers)
    naive_runs = []
    for r in range(repeats):
        naive_jobs = [EvalJob(s.trace_id, s.route[0], s.trace, s.truth, Method.NAIVE, seed=seed * 100003 + r * 1009 + k)
                      for k, s in enumerate(sims)]
        naive_runs.append(run_batch(graph, naive_jobs, cfg))
    return SyntheticReport(records, naive_runs)
