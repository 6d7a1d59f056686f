import json
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import city_histograms
from conftest import planar_graph, straight_road
from elasticpath.engine import PathingConfig, PathingOutcome, elastic_pathing
from elasticpath.evaluation import (
    DriveProfile,
    EvalJob,
    EvalRecord,
    Method,
    bin_index,
    bin_report,
    destination_error,
    evaluate,
    export_geojson,
    histogram_from_counts,
    make_grid_map,
    naive_guess,
    random_route,
    run_batch,
    run_synthetic,
    simulate_drive,
    within_rate,
)
from elasticpath.kinematics import can_make_turn
from elasticpath.mapgraph import turn_geometry
from elasticpath.trace import GpsFix, SpeedTrace


def record(err, tid="t"):
    return EvalRecord(tid, None, None, err, 0.0, 1)


def tr(speeds):
    return SpeedTrace.from_arrays(range(len(speeds)), speeds)


class TestDestinationError:
    def test_identical(self):
        a = GpsFix(0, 40.5, -74.45)
        assert destination_error(a, a) == 0.0

    def test_boundary_goes_up(self):
        assert bin_index(250.0) == 1
        assert bin_index(249.999) == 0
        assert bin_index(3250.0) == 13

    def test_antipodal_overflows(self):
        d = destination_error(GpsFix(0, 0, 0), GpsFix(0, 0, 180))
        assert bin_index(d) == 13


class TestBinReport:
    def test_new_jersey(self):
        h = histogram_from_counts(city_histograms.NEW_JERSEY)
        assert h.total == 254
        assert h.percents[0] == pytest.approx(17.32, abs=0.01)
        assert h.percents == pytest.approx(city_histograms.NEW_JERSEY_PERCENT, abs=0.01)

    def test_seattle(self):
        h = histogram_from_counts(city_histograms.SEATTLE)
        assert h.total == 691
        assert h.percents == pytest.approx(city_histograms.SEATTLE_PERCENT, abs=0.01)

    def test_cumulative(self):
        for counts, cum in ((city_histograms.NEW_JERSEY, city_histograms.NEW_JERSEY_CUMULATIVE), (city_histograms.SEATTLE, city_histograms.SEATTLE_CUMULATIVE)):
            h = histogram_from_counts(counts)
            assert [h.cumulative_percent(250.0 * k) for k in range(1, 6)] == pytest.approx(cum, abs=0.01)

    def test_records_reproduce_counts(self):
        rng = random.Random(0)
        errs = [rng.uniform(250 * k, 250 * (k + 1)) if k < 13 else 1e6 for k, c in enumerate(city_histograms.NEW_JERSEY) for _ in range(c)]
        h = bin_report([record(e) for e in errs])
        assert h.bins == city_histograms.NEW_JERSEY

    def test_all_zero(self):
        h = bin_report([record(0.0) for _ in range(7)])
        assert h.percents[0] == 100.0

    def test_every_boundary(self):
        h = bin_report([record(250.0 * k) for k in range(1, 14)])
        assert h.bins == [0] + [1] * 13

    def test_empty(self):
        with pytest.raises(ValueError):
            bin_report([])

    @given(st.lists(st.floats(0, 1e5), min_size=1, max_size=300))
    def test_invariants(self, errs):
        h = bin_report([record(e) for e in errs])
        assert sum(h.bins) == h.total == len(errs)
        assert sum(h.percents) == pytest.approx(100.0, abs=0.01)
        assert len(h.labels) == 14 and h.labels[-1] == ">3250"

    def test_json_round_trip(self):
        r = EvalRecord("x", GpsFix(1, 2, 3), GpsFix(1, 2.1, 3), 11.0, 0.5, 9, Method.NAIVE)
        assert EvalRecord.from_json(json.loads(json.dumps(r.to_json()))) == r


class TestNaive:
    def test_straight_road_matches_elastic(self):
        g = straight_road(10, 100.0)
        trace = tr([0.0] + [10.0] * 43)
        elastic = elastic_pathing(g, 1, trace).best.end_point(g)
        assert naive_guess(g, 1, trace, seed=4).end_point(g) == pytest.approx(elastic)

    def test_deterministic(self):
        g = make_grid_map(6, 100.0)
        trace = tr([0.0] + [10.0] * 120)
        assert naive_guess(g, 8, trace, 3).nodes == naive_guess(g, 8, trace, 3).nodes

    def test_dead_end(self):
        g = straight_road(2, 100.0)
        p = naive_guess(g, 1, tr([0.0] + [10.0] * 50), 0)
        assert p.complete and p.nodes == [1, 2, 3] and p.final_distance == pytest.approx(200.0)

    def test_no_u_turns(self):
        g = make_grid_map(6, 100.0)
        p = naive_guess(g, 1, tr([0.0] + [10.0] * 200), 11)
        assert all(a != c for a, c in zip(p.nodes, p.nodes[2:]))

    def test_choices_uniform(self, plus_junction):
        trace = tr([0.0] + [10.0] * 15)
        firsts = [naive_guess(plus_junction, 4, trace, s).nodes[2] for s in range(3000)]
        counts = np.bincount(firsts, minlength=6)[[2, 3, 5]]
        assert counts.min() > 900

    def test_unknown_start(self):
        with pytest.raises(KeyError):
            naive_guess(straight_road(), 99, tr([0.0, 1.0]))


class TestSimulator:
    def test_one_segment_integrates_to_length(self):
        g = straight_road(1, 300.0)
        trace, truth = simulate_drive(g, [1, 2])
        e = g.edge(1, 2)
        assert trace.total_distance == pytest.approx(e.length, abs=2.0)
        v = trace.speeds
        peak = int(np.argmax(v))
        assert np.all(np.diff(v[: peak + 1]) >= -1e-9) and np.all(np.diff(v[peak:]) <= 1e-9)
        assert (truth.lat, truth.lon) == (g.nodes[2].lat, g.nodes[2].lon)

    def test_stop_at_every_junction(self):
        g = make_grid_map(5, 100.0)
        route = [1, 2, 3, 4, 9, 14]
        trace, _ = simulate_drive(g, route, DriveProfile(stop_probability_at_junction=1.0))
        v = trace.speeds
        runs = np.sum((v[1:] < 0.45) & (v[:-1] >= 0.45))
        junctions = sum(g.is_intersection(n) for n in route[1:-1])
        assert runs == junctions + 1  # plus the final stop

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 1000))
    def test_speeds_respect_limits_and_turns(self, seed):
        g = make_grid_map(6, 100.0, jitter=0.2, seed=seed, highway_spine=True)
        rng = random.Random(seed)
        route = random_route(g, rng, 800.0)
        trace, _ = simulate_drive(g, route, DriveProfile(cruise_speed=30.0), seed=seed)
        assert trace.total_distance == pytest.approx(sum(g.edge(a, b).length for a, b in zip(route, route[1:])), abs=1e-6)
        od, v = trace.odometer, trace.speeds
        cum = np.cumsum([0.0] + [g.edge(a, b).length for a, b in zip(route, route[1:])])
        ways = [g.edge(a, b).way for a, b in zip(route, route[1:])]
        for i in range(1, len(v)):
            # mean speed over a second never exceeds the fastest way touched during it
            k0 = min(len(ways) - 1, max(0, np.searchsorted(cum, od[i - 1], side="right") - 1))
            k1 = min(len(ways) - 1, np.searchsorted(cum, od[i], side="left"))
            assert v[i] <= max(g.ways[w].max_speed for w in ways[k0 : k1 + 1]) + 1e-9
        for k in range(1, len(route) - 1):
            i = int(np.searchsorted(od, cum[k], side="left"))
            td = turn_geometry(g, route[k - 1], route[k], route[k + 1])
            assert can_make_turn(min(v[i], v[max(i - 1, 0)]), td)

    def test_route_must_connect(self):
        g = make_grid_map(3, 100.0)
        with pytest.raises(ValueError):
            simulate_drive(g, [1, 9])

    def test_profile_validation(self):
        with pytest.raises(ValueError):
            DriveProfile(stop_probability_at_junction=1.5)
        with pytest.raises(ValueError):
            DriveProfile(accel=0.0)

    def test_stops_slow_the_trip(self):
        """More stops go with a lower average speed on simulated data."""
        from elasticpath.trace import behavior_features, linear_correlation

        g = make_grid_map(8, 150.0, jitter=0.2)
        rng = random.Random(2)
        stops, speeds = [], []
        for k in range(40):
            route = random_route(g, rng, 1500.0)
            p = DriveProfile(stop_probability_at_junction=rng.uniform(0.0, 1.0))
            f = behavior_features(simulate_drive(g, route, p, seed=k)[0])
            stops.append(f.stops)
            speeds.append(f.avg_speed)
        assert np.corrcoef(stops, speeds)[0, 1] < 0
        assert 0 < linear_correlation(stops, speeds) <= 1


class TestGeoJson:
    def setup_outcome(self):
        g = straight_road(10, 100.0)
        out = elastic_pathing(g, 1, tr([0.0] + [10.0] * 25))
        return g, out

    def test_candidate_and_truth(self):
        g, out = self.setup_outcome()
        doc = export_geojson(out, g, 1, truth=[1, 2, 3, 4])
        assert doc["type"] == "FeatureCollection" and len(doc["features"]) == 3
        roles = [f["properties"]["role"] for f in doc["features"]]
        assert roles == ["start", "candidate", "truth"]
        lon, lat = doc["features"][0]["geometry"]["coordinates"]
        assert (lat, lon) == (g.nodes[1].lat, g.nodes[1].lon)
        end = doc["features"][1]["geometry"]["coordinates"][-1]
        assert end[::-1] == pytest.approx(list(out.best.end_point(g)))

    def test_ranks_follow_error(self):
        g = make_grid_map(5, 100.0)
        out = elastic_pathing(g, 13, tr([0.0] + [3.0] * 80 + [0.0]), PathingConfig(delta=50.0))
        doc = export_geojson(out, g, 13)
        feats = [f["properties"] for f in doc["features"] if f["properties"]["role"] == "candidate"]
        assert [f["rank"] for f in feats] == list(range(1, len(feats) + 1))
        assert [f["error_m"] for f in feats] == sorted(f["error_m"] for f in feats)

    def test_empty_outcome(self):
        g = straight_road()
        doc = export_geojson(PathingOutcome([], 1), g, 1)
        assert len(doc["features"]) == 1
        json.dumps(doc)


class TestEndToEnd:
    def unique_stop_city(self):
        """Grid whose one street has stops at two irregularly placed junctions."""
        pts = {1: (0, 0), 2: (130, 0), 3: (200, 0), 4: (410, 0), 5: (530, 0),
               6: (130, 90), 7: (200, -120), 8: (410, 70), 9: (530, -60)}
        return planar_graph(pts, [(1, 2, 3, 4, 5), (6, 2), (3, 7), (8, 4), (5, 9)])

    def test_recovers_destination(self):
        g = self.unique_stop_city()
        route = [1, 2, 3, 4, 5, 9]
        trace, truth = simulate_drive(g, route, DriveProfile(stop_probability_at_junction=1.0))
        rec = evaluate(g, EvalJob("x", 1, trace, truth))
        assert rec.destination_error < 50.0

    def test_batch_keeps_input_order(self):
        g = make_grid_map(6, 120.0, jitter=0.2)
        rng = random.Random(1)
        jobs = []
        for k in range(6):
            route = random_route(g, rng, 600.0)
            trace, truth = simulate_drive(g, route, seed=k)
            jobs.append(EvalJob(f"j{k}", route[0], trace, truth))
        serial = run_batch(g, jobs)
        parallel = run_batch(g, jobs, workers=3)
        assert [r.trace_id for r in parallel] == [j.trace_id for j in jobs]
        assert [r.destination_error for r in parallel] == [r.destination_error for r in serial]

    def test_routing_method(self):
        g = make_grid_map(6, 120.0, jitter=0.2)
        route = random_route(g, random.Random(3), 700.0)
        trace, truth = simulate_drive(g, route, seed=3)
        rec = evaluate(g, EvalJob("r", route[0], trace, truth, Method.ELASTIC_ROUTING))
        assert rec.method is Method.ELASTIC_ROUTING and rec.destination_error is not None

    def test_synthetic_report(self):
        rep = run_synthetic(6, 120.0, trips=8, seed=2, repeats=3, min_length=600.0)
        doc = json.loads(json.dumps(rep.to_json()))
        assert len(doc["records"]) == 8 and doc["naive"]["repeats"] == 3
        nw = rep.naive_within(250.0)
        assert nw["min"] <= nw["avg"] <= nw["max"]
        assert sum(doc["histogram"]["bins"]) == 8

    def test_speed_limits_help_on_mixed_map(self):
        """Pruning by speed limit never costs accuracy on a map with a fast spine."""
        g = make_grid_map(8, 150.0, jitter=0.2, highway_spine=True, seed=4)
        rng = random.Random(4)
        jobs = []
        for k in range(30):
            route = random_route(g, rng, 1200.0)
            trace, truth = simulate_drive(g, route, DriveProfile(cruise_speed=25.0), seed=k)
            jobs.append(EvalJob(f"t{k}", route[0], trace, truth))
        on = run_batch(g, jobs, PathingConfig())
        off = run_batch(g, jobs, PathingConfig(use_speed_limits=False))
        assert within_rate(on, 500.0) >= within_rate(off, 500.0)
