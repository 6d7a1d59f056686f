import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import osm_doc, planar_graph, straight_road
from elasticpath.evaluation.synth import make_grid_map, to_osm_xml
from elasticpath.geo import haversine_m
from elasticpath.mapgraph import (
    DEFAULT_MAX_SPEED,
    OsmParseError,
    RoadWay,
    count_paths_within_distance,
    effective_max_speed,
    neighbors,
    parse_maxspeed,
    parse_osm,
    turn_geometry,
)
from oracles import brute_force_path_count

TWO_NODES = {1: (40.5, -74.45), 2: (40.5, -74.449)}


class TestParse:
    def test_residential_default_speed(self):
        g = parse_osm(osm_doc(TWO_NODES, [(7, [1, 2], {"highway": "residential"})]))
        assert len(g.ways) == 1
        assert g.ways[7].max_speed == pytest.approx(11.18)

    def test_rail_excluded(self):
        g = parse_osm(osm_doc(TWO_NODES, [(7, [1, 2], {"railway": "rail"})]))
        assert g.ways == {} and g.nodes == {}
        assert g.metadata["excluded_ways"] == 1

    @pytest.mark.parametrize("tags", [{"highway": "footway"}, {"highway": "residential", "access": "private"},
                                      {"highway": "cycleway"}, {"highway": "construction"}])
    def test_non_drivable_excluded(self, tags):
        assert parse_osm(osm_doc(TWO_NODES, [(7, [1, 2], tags)])).ways == {}

    def test_oneway(self):
        g = parse_osm(osm_doc(TWO_NODES, [(7, [1, 2], {"highway": "primary", "oneway": "yes"})]))
        assert [e.target for e in g.adjacency[1]] == [2]
        assert g.adjacency[2] == ()

    def test_oneway_reverse(self):
        g = parse_osm(osm_doc(TWO_NODES, [(7, [1, 2], {"highway": "primary", "oneway": "-1"})]))
        assert [e.target for e in g.adjacency[2]] == [1]
        assert g.adjacency[1] == ()

    def test_missing_node_drops_way(self):
        g = parse_osm(osm_doc(TWO_NODES, [(7, [1, 2], {"highway": "residential"}),
                                          (8, [2, 99], {"highway": "residential"})]))
        assert set(g.ways) == {7}
        assert g.metadata["dropped_ways_missing_nodes"] == 1

    def test_unreferenced_nodes_dropped(self):
        nodes = {**TWO_NODES, 3: (40.6, -74.4)}
        g = parse_osm(osm_doc(nodes, [(7, [1, 2], {"highway": "residential"})]))
        assert set(g.nodes) == {1, 2}

    def test_malformed_reports_position(self):
        with pytest.raises(OsmParseError) as exc:
            parse_osm(b'<osm>\n<node id="1" lat="1" lon="2">\n</osm>')
        assert exc.value.line == 3

    def test_lanes_per_direction(self):
        g = parse_osm(osm_doc(TWO_NODES, [(7, [1, 2], {"highway": "primary", "lanes": "4"})]))
        assert g.ways[7].lanes == 2

    def test_segment_lengths_are_haversine(self):
        g = parse_osm(osm_doc(TWO_NODES, [(7, [1, 2], {"highway": "residential"})]))
        (e,) = g.adjacency[1]
        assert e.length == pytest.approx(haversine_m(*TWO_NODES[1], *TWO_NODES[2]), rel=1e-6)

    def test_grid_round_trip(self):
        g = make_grid_map(4, 120.0, jitter=0.1, seed=3)
        back = parse_osm(to_osm_xml(g).encode())
        assert set(back.nodes) == set(g.nodes)
        for w in g.ways.values():
            assert back.ways[w.id].max_speed == pytest.approx(w.max_speed, rel=1e-6)
        assert sorted(back.adjacency[1]) == pytest.approx(sorted(g.adjacency[1]))


class TestSpeeds:
    @pytest.mark.parametrize("tag,expected", [("25 mph", 11.176), ("50", 13.889), ("50 km/h", 13.889),
                                              ("10 knots", 5.144)])
    def test_maxspeed_units(self, tag, expected):
        assert parse_maxspeed(tag) == pytest.approx(expected, abs=1e-3)

    @pytest.mark.parametrize("tag", [None, "", "signals", "none"])
    def test_unparseable_falls_back(self, tag):
        assert parse_maxspeed(tag) is None

    def test_untagged_motorway(self):
        w = RoadWay(1, (1, 2), 1.0, highway_class="motorway")
        assert effective_max_speed(w) == pytest.approx(29.06)

    def test_link_inherits_parent(self):
        w = RoadWay(1, (1, 2), 1.0, highway_class="primary_link")
        assert effective_max_speed(w) == DEFAULT_MAX_SPEED["primary"]


class TestNeighbors:
    def test_four_way(self, plus_junction):
        assert len(neighbors(plus_junction, 1, 2)) == 3
        assert len(neighbors(plus_junction, 1)) == 4

    def test_dead_end(self, plus_junction):
        assert neighbors(plus_junction, 2, 1) == []

    def test_unknown_node(self, plus_junction):
        with pytest.raises(KeyError):
            neighbors(plus_junction, 42)

    def test_way_sequences_traversable(self):
        g = make_grid_map(5, 100.0)
        for w in g.ways.values():
            for a, b in zip(w.node_sequence, w.node_sequence[1:]):
                prev = None
                assert b in [e.target for e in neighbors(g, a, prev)]

    def test_directionality(self):
        pts = {1: (0, 0), 2: (100, 0), 3: (200, 0)}
        g = planar_graph(pts, [(1, 2), (2, 3)], one_way={1})
        assert any(e.target == 1 for e in g.adjacency[2])
        assert any(e.target == 3 for e in g.adjacency[2])
        assert not any(e.target == 2 for e in g.adjacency[3])


class TestTurnGeometry:
    def test_right_angle(self, right_angle):
        td = turn_geometry(right_angle, 1, 2, 3)
        assert td.alpha == pytest.approx(math.pi / 2, abs=1e-9)
        assert td.entry_width_x == td.exit_width_y == pytest.approx(3.65)

    def test_straight(self, plus_junction):
        assert turn_geometry(plus_junction, 4, 1, 2).alpha == math.pi

    def test_120_degrees(self, y_junction):
        assert turn_geometry(y_junction, 2, 1, 3).alpha == pytest.approx(2 * math.pi / 3, abs=1e-9)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-200, 200), st.floats(-200, 200), st.floats(-200, 200), st.floats(-200, 200))
    def test_symmetric(self, ax, ay, bx, by):
        if math.hypot(ax, ay) < 1 or math.hypot(bx, by) < 1:
            return
        g = planar_graph({1: (0, 0), 2: (ax, ay), 3: (bx, by)}, [(2, 1, 3)])
        assert turn_geometry(g, 2, 1, 3).alpha == pytest.approx(turn_geometry(g, 3, 1, 2).alpha, abs=1e-9)


class TestPathCount:
    def test_straight_line(self):
        g = straight_road(6, 100.0)
        assert count_paths_within_distance(g, 1, 300.0).path_count == 1

    def test_grid_matches_brute_force(self):
        g = make_grid_map(5, 100.0)
        for start in (1, 7, 13):
            for radius in (150.0, 200.0, 350.0):
                assert count_paths_within_distance(g, start, radius).path_count == \
                    brute_force_path_count(g, start, radius)

    def test_superlinear(self):
        g = make_grid_map(9, 100.0)
        c1 = count_paths_within_distance(g, 41, 200.0).path_count
        c2 = count_paths_within_distance(g, 41, 400.0).path_count
        assert c2 > 2 * c1

    def test_monotone(self):
        g = make_grid_map(6, 100.0, jitter=0.2, seed=1)
        counts = [count_paths_within_distance(g, 15, r).path_count for r in range(50, 700, 50)]
        assert counts == sorted(counts)

    def test_cap(self):
        g = make_grid_map(8, 100.0)
        pc = count_paths_within_distance(g, 1, 1500.0, cap=1000)
        assert pc.capped and pc.path_count == 1000
        assert set(pc.to_json()) == {"start_node", "radius_m", "path_count", "capped"}

    def test_bad_radius(self):
        with pytest.raises(ValueError):
            count_paths_within_distance(straight_road(), 1, 0.0)


class TestGrid:
    def test_two_by_two(self):
        g = make_grid_map(2, 100.0)
        assert len(g.nodes) == 4
        assert sum(len(es) for es in g.adjacency.values()) == 8  # 4 undirected edges

    def test_degrees(self):
        g = make_grid_map(5, 100.0)
        assert {g.degree(n) for n in g.nodes} == {2, 3, 4}

    def test_segment_lengths(self):
        g = make_grid_map(5, 150.0)
        for es in g.adjacency.values():
            for e in es:
                assert e.length == pytest.approx(150.0, rel=1e-3)

    def test_nearest_node(self):
        g = make_grid_map(3, 100.0)
        n = g.nodes[5]
        assert g.nearest_node(n.lat + 1e-5, n.lon) == 5
        with pytest.raises(ValueError):
            g.nearest_node(n.lat + 1.0, n.lon)
