"""Reconstruct a driven route and destination from a start point and a speed trace."""

from .engine import (
    CandidatePath,
    Landmark,
    PathingConfig,
    PathingOutcome,
    elastic_pathing,
    goto_branch,
    pin,
    reconcile_stop,
    reconcile_turn,
    within_speed_limit,
)
from .kinematics import (
    TurnModelParams,
    can_make_turn,
    intersection_turn_radius,
    max_turn_speed,
    safe_turn_radius,
    turn_speed_limit,
)
from .mapgraph import (
    DrivabilityPolicy,
    OsmParseError,
    RoadGraph,
    RoadNode,
    RoadWay,
    TurnDescriptor,
    count_paths_within_distance,
    load_osm,
    parse_osm,
    turn_geometry,
)
from .routing import RoutingScoreParams, combined_score, rerank_top_k, shortest_route
from .trace import (
    GpsFix,
    Source,
    SpeedSample,
    SpeedTrace,
    TraceError,
    behavior_features,
    gps_to_speed,
    linear_correlation,
    split_trips,
)

__version__ = "0.1.0"
